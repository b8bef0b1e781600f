#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace transitepi {

struct csv_row {
  std::size_t line{0};
  std::vector<std::string> fields;
};

/// A delimited text file split into header and rows. Quoted fields follow
/// the usual double-quote convention; line numbers are 1-based and count
/// the header.
struct csv_table {
  std::string file;
  char delimiter{','};
  std::size_t header_line{1};
  std::vector<std::string> header;
  std::vector<csv_row> rows;

  std::optional<std::size_t> find_column(std::string_view name) const;

  /// Throws data_error(missing_column) when absent.
  std::size_t column(std::string_view name) const;

  /// Field of a row; throws data_error(malformed_row) when the row is short.
  std::string_view field(csv_row const&, std::size_t col) const;
};

/// `delimiter == 0` picks tab when the header contains one, comma otherwise.
csv_table parse_csv(std::string_view text, std::string file,
                    char delimiter = 0);

std::string read_text_file(std::string const& path);

/// Quotes a field when it contains the delimiter, a quote or a newline.
std::string csv_escape(std::string_view field, char delimiter = ',');

}  // namespace transitepi
