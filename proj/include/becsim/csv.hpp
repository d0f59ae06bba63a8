#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace becsim {

// 17 significant digits, scientific, '.' decimal separator. Enough to
// round-trip any double, and byte-stable across reruns.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

// Minimal CSV emitter for the fixed column layouts the tools write.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();

  void header(const std::vector<std::string>& cols);
  // One row; mixed integer/double cells are preformatted by the caller.
  void row(const std::vector<std::string>& cells);

  static std::string cell(double v) { return format_double(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }

 private:
  std::ofstream out_;
};

// FNV-1a 64-bit over a file's bytes, hex encoded; used for output manifests.
std::string fnv1a64_file(const std::string& path);

}  // namespace becsim
