#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wcreg {

/// Numeric CSV rows under a fixed header; `#` lines are skipped (and kept in
/// `comments` without the leading "# ").
struct NumericTable {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;
};

/// Throws PreconditionError when the header differs or a row is malformed.
NumericTable read_numeric_csv(std::istream& in, std::string_view header);

/// Comma-joined values, 17 significant digits, trailing newline.
void write_numeric_row(std::ostream& out, std::span<const double> values);

}  // namespace wcreg
