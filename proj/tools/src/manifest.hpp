#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zatlas/atlas_io.hpp"

namespace zatlas::cli {

std::string sha256_hex(std::string_view data);

struct OutputFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

struct Manifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::string started_utc;
  std::string finished_utc;
  std::vector<CheckResult> verdicts;
  std::vector<OutputFile> files;
};

std::string utc_now();

/// Writes `data` to dir/name and records its digest.
void write_output(const std::filesystem::path& dir, const std::string& name, const std::string& data, Manifest& m);

std::string manifest_to_json(const Manifest& m);

}  // namespace zatlas::cli
