#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/version.hpp"

namespace decaylab {

// FNV-1a over raw bytes; stamps every report with the config identity
inline uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file(const std::string& path);

// CSV sink: '.' decimals, LF line endings, one metadata comment line, and
// an atomic write-then-rename commit
class CsvWriter {
 public:
  CsvWriter(std::string meta, std::vector<std::string> columns)
      : meta_(std::move(meta)), columns_(std::move(columns)) {}

  void row(const std::vector<std::string>& cells);
  void row_values(const std::vector<double>& values);

  void write(const std::filesystem::path& path) const;

  static std::string format(double v);

 private:
  std::string meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_meta(uint64_t config_hash, uint64_t seed);

void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace decaylab
