#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace issa {

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);
std::string format_number(std::int64_t v);
std::string format_number(std::uint64_t v);

/// Writes comma-separated rows; fields containing commas or quotes are
/// quoted.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(&out) {}

  void row(const std::vector<std::string>& fields);

 private:
  std::ostream* out_;
};

}  // namespace issa
