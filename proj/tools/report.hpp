#pragma once

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace pkcli {

using Json = nlohmann::ordered_json;

// One run's output: flat records plus optional summary fields that only the
// JSON form carries.
struct Report {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<Json> records;
  Json summary = Json::object();

  // Appends a record, stamping seed and config hash.
  Json& add(Json record);
};

void write_json(std::ostream& os, const Report& r);
// Columns are the union of record keys in first-seen order.
void write_csv(std::ostream& os, const Report& r);

}  // namespace pkcli
