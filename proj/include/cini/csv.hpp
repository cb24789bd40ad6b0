#ifndef CINI_CSV_HPP
#define CINI_CSV_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cini {

/// Fixed 17-significant-digit float formatting; identical inputs always
/// produce identical bytes.
std::string csv_num(double x);

/// RFC-4180 writer: header row, CRLF line endings, '.' decimal separator.
/// Output carries no timestamps, keeping files diffable across runs.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& file, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  size_t width_;
};

}  // namespace cini

#endif  // CINI_CSV_HPP
