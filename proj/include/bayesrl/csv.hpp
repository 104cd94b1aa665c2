#ifndef BAYESRL_CSV_HPP_
#define BAYESRL_CSV_HPP_

#include <string>
#include <vector>

// Minimal CSV output with a fixed numeric format, written atomically.
//
// Floating-point cells are printed with printf "%.17g" (17 significant
// digits round-trips an IEEE double exactly), rows end with "\n", and the
// file is staged to "<path>.tmp" and renamed into place on commit, so a
// crashed or failed run never leaves a partial output file behind.

namespace bayesrl {

std::string format_double(double value);

class CsvWriter {
 public:
  // Opens the staging file and writes the header row.
  CsvWriter(std::string path, const std::vector<std::string>& header);
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void write_row(const std::vector<std::string>& cells);
  // Flushes and renames the staging file onto the target path.
  void commit();

 private:
  std::string path_;
  std::string temp_path_;
  void* file_ = nullptr;  // FILE*
  bool committed_ = false;
};

}  // namespace bayesrl

#endif  // BAYESRL_CSV_HPP_
