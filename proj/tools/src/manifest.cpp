#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "zatlas/error.hpp"
#include "zatlas/pipeline.hpp"

namespace zatlas::cli {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidConfig, "SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_output(const std::filesystem::path& dir, const std::string& name, const std::string& data, Manifest& m) {
  const auto path = dir / name;
  std::ofstream f(path, std::ios::binary);
  f << data;
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  m.files.push_back({name, sha256_hex(data), data.size()});
}

std::string manifest_to_json(const Manifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "zatlas";
  j["version"] = kVersion;
  j["command"] = m.command;
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.config) cfg[k] = v;
  j["started_utc"] = m.started_utc;
  j["finished_utc"] = m.finished_utc;
  j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& c : m.verdicts) j["verdicts"].push_back({{"name", c.name}, {"pass", c.pass}});
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : m.files) j["files"].push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  return j.dump(2) + "\n";
}

}  // namespace zatlas::cli
