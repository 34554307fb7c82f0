#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fleq/model.hpp"

namespace fleq {

// Shortest decimal string that round-trips to the same double; "-0" becomes "0".
std::string format_double(double value);

// Plain comma-separated writer, "\n" line endings, no quoting.  Every row must
// match the header width.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t width_;

  void write_line(const std::vector<std::string>& cells);
};

// Reads a price profile with header "period,beta", period numbers contiguous
// from zero, at least two rows.  Throws ParseError on malformed content and
// ConfigError when the file cannot be opened.
Vector load_prices_csv(const std::filesystem::path& path);

}  // namespace fleq
