#pragma once

// RFC-4180 CSV output with round-trippable number formatting.

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace blowup {

/// Shortest decimal text that parses back to the same double ("%.17g" fallback).
std::string format_number(double v);

class CsvWriter {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> names);
  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

 private:
  void cell(const Cell& c, bool first);
  std::ostream& os_;
};

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view s);

}  // namespace blowup
