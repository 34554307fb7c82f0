#include "fleq/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string_view>
#include <system_error>

#include "fleq/errors.hpp"

namespace fleq {

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds away the negative-zero sign
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw ConfigError("cannot open " + path.string() + " for writing");
  write_line(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw std::invalid_argument("row width does not match the header");
  write_line(cells);
}

void CsvWriter::write_line(const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k > 0) out_ << ',';
    out_ << cells[k];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("write failed");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view cell, int line, const char* what) {
  const std::string text(trim(cell));
  if (text.empty()) throw ParseError(line, std::string("empty ") + what);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(value))
    throw ParseError(line, std::string("bad ") + what + " '" + text + "'");
  return value;
}

}  // namespace

Vector load_prices_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());

  std::string raw;
  int line = 1;
  if (!std::getline(in, raw)) throw ParseError(1, "missing header");
  if (trim(raw) != "period,beta")
    throw ParseError(1, "expected header 'period,beta'");

  std::vector<double> beta;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view sv = trim(raw);
    if (sv.empty()) throw ParseError(line, "blank row");
    const auto comma = sv.find(',');
    if (comma == std::string_view::npos || sv.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(line, "expected exactly two columns");

    const double period = parse_number(sv.substr(0, comma), line, "period");
    const auto expected = static_cast<double>(beta.size());
    if (period != expected)
      throw ParseError(line, "periods must count up from 0 without gaps");
    beta.push_back(parse_number(sv.substr(comma + 1), line, "beta"));
  }
  if (beta.size() < 2) throw ParseError(line, "need at least two periods");

  return Eigen::Map<const Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
}

}  // namespace fleq
