#include "wcreg/csv.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "wcreg/error.hpp"
#include "wcreg/grid.hpp"

namespace wcreg {

NumericTable read_numeric_csv(std::istream& in, std::string_view header) {
  NumericTable table;
  std::size_t columns = 1;
  for (char ch : header) columns += ch == ',' ? 1 : 0;

  bool header_seen = false;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto start = line.find_first_not_of("# ");
      table.comments.push_back(start == std::string::npos ? "" : line.substr(start));
      continue;
    }
    if (!header_seen) {
      if (line != header) {
        throw PreconditionError("expected CSV header '" + std::string(header) + "', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::logic_error&) {
        throw PreconditionError("malformed CSV cell '" + cell + "'");
      }
    }
    if (row.size() != columns) throw PreconditionError("CSV row has wrong column count: '" + line + "'");
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw PreconditionError("CSV input lacks header '" + std::string(header) + "'");
  return table;
}

void write_numeric_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << format_double(values[i]);
  }
  out << '\n';
}

}  // namespace wcreg
