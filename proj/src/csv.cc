#include "transitepi/csv.h"

#include <fstream>
#include <sstream>

#include <boost/tokenizer.hpp>

#include "transitepi/error.h"

namespace transitepi {

namespace {

std::vector<std::string> split_line(std::string const& line, char delimiter,
                                    std::string const& file,
                                    std::size_t line_no) {
  using separator = boost::escaped_list_separator<char>;
  try {
    boost::tokenizer<separator> tok{
        line, separator{std::string{}, std::string(1, delimiter), "\""}};
    std::vector<std::string> fields;
    for (auto const& f : tok) {
      fields.emplace_back(f);
    }
    return fields;
  } catch (boost::escaped_list_error const& e) {
    throw data_error{data_errc::malformed_row, file, line_no, "quoting",
                     e.what()};
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

std::optional<std::size_t> csv_table::find_column(std::string_view name) const {
  for (auto i = std::size_t{0}; i < header.size(); ++i) {
    if (header[i] == name) {
      return i;
    }
  }
  return std::nullopt;
}

std::size_t csv_table::column(std::string_view name) const {
  if (auto const c = find_column(name); c.has_value()) {
    return *c;
  }
  throw data_error{data_errc::missing_column, file, header_line,
                   std::string{name}};
}

std::string_view csv_table::field(csv_row const& row, std::size_t col) const {
  if (col >= row.fields.size()) {
    throw data_error{data_errc::malformed_row, file, row.line,
                     col < header.size() ? header[col] : "column",
                     "row has " + std::to_string(row.fields.size()) +
                         " fields, header has " +
                         std::to_string(header.size())};
  }
  return trim(row.fields[col]);
}

csv_table parse_csv(std::string_view text, std::string file, char delimiter) {
  if (text.starts_with("\xEF\xBB\xBF")) {
    text.remove_prefix(3);
  }

  csv_table table;
  table.file = std::move(file);

  auto line_no = std::size_t{0};
  auto header_seen = false;
  while (!text.empty()) {
    auto const eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (trim(line).empty()) {
      continue;
    }

    if (!header_seen) {
      table.header_line = line_no;
      table.delimiter = delimiter != 0 ? delimiter
                        : line.find('\t') != std::string_view::npos ? '\t'
                                                                    : ',';
      for (auto const& f :
           split_line(std::string{line}, table.delimiter, table.file, line_no)) {
        table.header.emplace_back(trim(f));
      }
      header_seen = true;
      continue;
    }

    table.rows.push_back(csv_row{
        line_no,
        split_line(std::string{line}, table.delimiter, table.file, line_no)});
  }

  if (!header_seen) {
    throw data_error{data_errc::missing_column, table.file, 1, "header",
                     "file is empty"};
  }
  return table;
}

std::string read_text_file(std::string const& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw data_error{data_errc::missing_file, path, 0, path};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_escape(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter} + "\"\n\r") ==
      std::string_view::npos) {
    return std::string{field};
  }
  std::string out = "\"";
  for (auto const c : field) {
    if (c == '"') {
      // The reader has no escape character; drop embedded quotes.
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace transitepi
