#include "transitepi/manifest.h"

#include "fmt/core.h"
#include "openssl/evp.h"

#include "transitepi/csv.h"
#include "transitepi/error.h"

#ifndef TRANSITEPI_VERSION
#define TRANSITEPI_VERSION "0.0.0"
#endif

namespace transitepi {

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error{"SHA-256 digest failed"};
  }
  std::string hex;
  for (auto i = 0U; i < len; ++i) {
    hex += fmt::format("{:02x}", md[i]);
  }
  return hex;
}

std::string sha256_file(std::string const& path) {
  return sha256_hex(read_text_file(path));
}

std::string tool_version() { return TRANSITEPI_VERSION; }

namespace {

nlohmann::json digests_to_json(std::vector<file_digest> const& v) {
  auto arr = nlohmann::json::array();
  for (auto const& d : v) {
    arr.push_back({{"path", d.path}, {"sha256", d.sha256}});
  }
  return arr;
}

std::vector<file_digest> digests_from_json(nlohmann::json const& j) {
  std::vector<file_digest> v;
  for (auto const& d : j) {
    v.push_back({d.at("path").get<std::string>(),
                 d.at("sha256").get<std::string>()});
  }
  return v;
}

}  // namespace

std::string serialize_manifest(run_manifest const& m) {
  nlohmann::json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["arguments"] = m.arguments;
  j["inputs"] = digests_to_json(m.inputs);
  j["outputs"] = digests_to_json(m.outputs);
  return j.dump(2) + "\n";
}

run_manifest parse_manifest(std::string_view text) {
  try {
    auto const j = nlohmann::json::parse(text);
    run_manifest m;
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.arguments = j.at("arguments");
    m.inputs = digests_from_json(j.at("inputs"));
    m.outputs = digests_from_json(j.at("outputs"));
    if (m.tool != "transitepi") {
      throw config_error{fmt::format("manifest of unknown tool '{}'", m.tool)};
    }
    return m;
  } catch (nlohmann::json::exception const& e) {
    throw config_error{fmt::format("malformed manifest: {}", e.what())};
  }
}

}  // namespace transitepi
