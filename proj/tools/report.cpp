#include "report.hpp"

#include <algorithm>

namespace pkcli {

Json& Report::add(Json record) {
  record["seed"] = seed;
  record["config_hash"] = config_hash;
  records.push_back(std::move(record));
  return records.back();
}

void write_json(std::ostream& os, const Report& r) {
  Json doc;
  doc["command"] = r.command;
  doc["config_hash"] = r.config_hash;
  doc["seed"] = r.seed;
  doc["records"] = r.records;
  for (const auto& [k, v] : r.summary.items()) doc[k] = v;
  os << doc.dump(2) << "\n";
}

namespace {

std::string cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  return v.dump();
}

}  // namespace

void write_csv(std::ostream& os, const Report& r) {
  std::vector<std::string> cols;
  for (const auto& rec : r.records)
    for (const auto& [k, v] : rec.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& rec : r.records) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os << ",";
      if (rec.contains(cols[i])) os << cell(rec[cols[i]]);
    }
    os << "\n";
  }
}

}  // namespace pkcli
