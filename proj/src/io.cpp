#include "blowup/io.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace blowup {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::header(std::initializer_list<std::string_view> names) {
  bool first = true;
  for (auto n : names) {
    if (!first) os_ << ',';
    os_ << csv_escape(n);
    first = false;
  }
  os_ << "\r\n";
}

void CsvWriter::cell(const Cell& c, bool first) {
  if (!first) os_ << ',';
  if (auto* d = std::get_if<double>(&c)) os_ << format_number(*d);
  else if (auto* i = std::get_if<long long>(&c)) os_ << *i;
  else os_ << csv_escape(std::get<std::string>(c));
}

void CsvWriter::row(std::initializer_list<Cell> cells) {
  bool first = true;
  for (const auto& c : cells) {
    cell(c, first);
    first = false;
  }
  os_ << "\r\n";
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  bool first = true;
  for (const auto& c : cells) {
    cell(c, first);
    first = false;
  }
  os_ << "\r\n";
}

}  // namespace blowup
