#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbloch/config.hpp"

namespace mbloch::cli {

/// Plot-ready table. `meta` entries are added to the JSON document and
/// emitted as trailing `# key value` lines in CSV.
struct Table {
  std::string command;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::json meta = nlohmann::json::object();
};

/// 17 significant digits, shortest-exponent "%g" style.
std::string format_number(double x);

/// First line `# mechanical-bloch v1 <command>`, then the column header and
/// rows; `\n` line endings.
void write_csv(std::ostream& os, const Table& table);
void write_json(std::ostream& os, const Table& table);
void write_table(std::ostream& os, const Table& table, OutputFormat format);

}  // namespace mbloch::cli
