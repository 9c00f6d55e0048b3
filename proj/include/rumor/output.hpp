#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace rumor::output {

inline constexpr int kSchemaVersion = 1;

using Cell = std::variant<std::string, std::int64_t, double>;

/// Shortest round-trip text of a double, independent of the C locale.
inline std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

inline std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, double>) return format_number(v);
        else return std::to_string(v);
      },
      cell);
}

/// One experiment's result: echoed configuration, fixed columns, rows, and
/// optional trailing summary values.
struct Record {
  std::string experiment;
  /// Ordered (flag, value) pairs; replaying them reproduces the output.
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;

  std::string replay_command() const {
    std::string cmd = "rumorbench " + experiment;
    for (const auto& [key, value] : config) {
      if (value == "true") cmd += " --" + key;
      else if (value != "false") cmd += " --" + key + " " + value;
    }
    return cmd;
  }
};

/// Comment header lines start with '#'; summary values follow the rows as
/// '# key=value' trailer lines.
inline void write_csv(std::ostream& os, const Record& rec) {
  os << "# rumorbench schema_version=" << kSchemaVersion << " experiment=" << rec.experiment << '\n';
  os << "# replay: " << rec.replay_command() << '\n';
  for (std::size_t i = 0; i < rec.columns.size(); ++i) os << (i ? "," : "") << rec.columns[i];
  os << '\n';
  for (const auto& row : rec.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  for (const auto& [key, value] : rec.summary) os << "# " << key << '=' << format_cell(value) << '\n';
}

inline nlohmann::ordered_json to_json(const Cell& cell) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, cell);
}

inline void write_json(std::ostream& os, const Record& rec) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["experiment"] = rec.experiment;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [key, value] : rec.config) config[key] = value;
  doc["config"] = config;
  doc["replay"] = rec.replay_command();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : rec.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[rec.columns[i]] = to_json(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = rows;
  if (!rec.summary.empty()) {
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [key, value] : rec.summary) summary[key] = to_json(value);
    doc["summary"] = summary;
  }
  os << doc.dump(2) << '\n';
}

}  // namespace rumor::output
