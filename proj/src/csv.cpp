#include "becsim/csv.hpp"

#include "becsim/errors.hpp"

namespace becsim {

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw NumericError("cannot open output file: " + path);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::header(const std::vector<std::string>& cols) { row(cols); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NumericError("cannot open file for checksum: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace becsim
