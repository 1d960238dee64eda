#include "mbloch/output.hpp"

#include <cmath>

#include <fmt/format.h>

namespace mbloch::cli {

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

void write_csv(std::ostream& os, const Table& table) {
  os << "# mechanical-bloch v1 " << table.command << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  for (const auto& [key, value] : table.meta.items())
    os << "# " << key << ' ' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
}

void write_json(std::ostream& os, const Table& table) {
  nlohmann::json doc = table.meta;
  doc["schema"] = "mechanical-bloch v1 " + table.command;
  doc["columns"] = table.columns;
  // serialize numbers through format_number so JSON and CSV agree digit for digit
  std::string body = doc.dump(2);
  body.pop_back();  // closing brace
  while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.pop_back();
  os << body << ",\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    os << (r ? ",\n    [" : "\n    [");
    const auto& row = table.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double x = row[i];
      os << (i ? ", " : "") << (std::isfinite(x) ? format_number(x) : std::string("null"));
    }
    os << ']';
  }
  os << (table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

void write_table(std::ostream& os, const Table& table, OutputFormat format) {
  if (format == OutputFormat::Json)
    write_json(os, table);
  else
    write_csv(os, table);
}

}  // namespace mbloch::cli
