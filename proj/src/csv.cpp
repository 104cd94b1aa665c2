#include "bayesrl/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace bayesrl {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

CsvWriter::CsvWriter(std::string path, const std::vector<std::string>& header)
    : path_(std::move(path)), temp_path_(path_ + ".tmp") {
  std::FILE* f = std::fopen(temp_path_.c_str(), "wb");
  if (f == nullptr) {
    throw std::runtime_error("CsvWriter: cannot open " + temp_path_);
  }
  file_ = f;
  write_row(header);
}

CsvWriter::~CsvWriter() {
  if (file_ != nullptr) {
    std::fclose(static_cast<std::FILE*>(file_));
    file_ = nullptr;
  }
  if (!committed_) {
    std::error_code ec;
    std::filesystem::remove(temp_path_, ec);
  }
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (file_ == nullptr) throw std::logic_error("CsvWriter: writer is closed");
  std::FILE* f = static_cast<std::FILE*>(file_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) std::fputc(',', f);
    std::fwrite(cells[i].data(), 1, cells[i].size(), f);
  }
  std::fputc('\n', f);
}

void CsvWriter::commit() {
  if (file_ == nullptr) throw std::logic_error("CsvWriter: already committed");
  std::FILE* f = static_cast<std::FILE*>(file_);
  if (std::fflush(f) != 0 || std::fclose(f) != 0) {
    file_ = nullptr;
    throw std::runtime_error("CsvWriter: flush failed for " + temp_path_);
  }
  file_ = nullptr;
  std::filesystem::rename(temp_path_, path_);
  committed_ = true;
}

}  // namespace bayesrl
