#include "run_config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace pkcli {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

pk_jump_kind jump_kind(const std::string& name) {
  if (name == "none") return PK_JUMP_NONE;
  if (name == "constant") return PK_JUMP_CONSTANT;
  if (name == "normal") return PK_JUMP_NORMAL;
  if (name == "exponential") return PK_JUMP_EXPONENTIAL;
  throw ApiError{PK_ERR_INVALID_ARGUMENT, "unknown jump law '" + name + "'"};
}

void read_table(const std::string& path, std::vector<double>& t, std::vector<double>& v) {
  std::ifstream in(path);
  if (!in) throw ApiError{PK_ERR_INVALID_ARGUMENT, "cannot open table '" + path + "'"};
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a = 0.0;
    double b = 0.0;
    if (ls >> a >> b) {
      t.push_back(a);
      v.push_back(b);
    }
  }
}

}  // namespace

std::string canonical(const RunConfig& c) {
  std::map<std::string, std::string> kv{
      {"command", c.command},
      {"family", c.family},
      {"delta", num(c.delta)},
      {"method", c.method},
      {"reps", std::to_string(c.reps)},
      {"initial_horizon", std::to_string(c.initial_horizon)},
      {"max_horizon", std::to_string(c.max_horizon)},
      {"growth", num(c.growth)},
      {"stability", num(c.stability)},
      {"horizon", num(c.horizon)},
      {"mesh", num(c.mesh)},
      {"window", num(c.window)},
      {"refine", std::to_string(c.refine)},
  };
  if (c.family == "levy") {
    kv["brownian"] = c.brownian ? "true" : "false";
    kv["phi_sigma"] = num(c.phi_sigma);
    kv["phi_rate"] = num(c.phi_rate);
    kv["phi_jump"] = c.phi_jump;
    kv["phi_jump_a"] = num(c.phi_jump_a);
    kv["phi_jump_b"] = num(c.phi_jump_b);
  } else {
    kv["alpha"] = num(c.alpha);
    if (c.family == "gaussian") {
      kv["scale"] = num(c.scale);
      kv["table"] = c.table;
    }
  }
  if (c.command == "bound") {
    kv["power_c"] = num(c.power_c);
    kv["power_kappa"] = num(c.power_kappa);
  }
  if (c.command == "maxstable") {
    kv["check"] = c.check;
    kv["times"] = list(c.times);
    kv["thresholds"] = list(c.thresholds);
    kv["n"] = std::to_string(c.n);
    kv["block"] = std::to_string(c.block);
    kv["point"] = std::to_string(c.point);
    kv["i_min"] = std::to_string(c.i_min);
    kv["i_max"] = std::to_string(c.i_max);
    kv["atom_cap"] = std::to_string(c.atom_cap);
    kv["oracle_reps"] = std::to_string(c.oracle_reps);
    kv["threshold"] = num(c.threshold);
  }
  if (c.command == "smallball") {
    kv["etas"] = list(c.etas);
    kv["cutoff"] = std::to_string(c.cutoff);
    kv["max_cutoff"] = std::to_string(c.max_cutoff);
  }
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& c) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << fnv1a(canonical(c));
  return os.str();
}

void check(pk_status s) {
  if (s != PK_OK) throw ApiError{s, pk_last_error_message()};
}

ModelPtr make_model(const RunConfig& c) {
  pk_model* m = nullptr;
  if (c.family == "fbm") {
    check(pk_model_create_power(c.alpha, &m));
  } else if (c.family == "gaussian") {
    if (!c.table.empty()) {
      std::vector<double> t;
      std::vector<double> v;
      read_table(c.table, t, v);
      check(pk_model_create_tabulated(t.data(), v.data(), t.size(), &m));
    } else {
      check(pk_model_create_scaled_power(c.alpha, c.scale, &m));
    }
  } else if (c.family == "levy") {
    if (c.brownian) {
      check(pk_model_create_levy(1.0, 0.0, PK_JUMP_NONE, 0.0, 0.0, &m));
    } else {
      check(pk_model_create_levy(c.phi_sigma, c.phi_rate, jump_kind(c.phi_jump), c.phi_jump_a,
                                 c.phi_jump_b, &m));
    }
  } else {
    throw ApiError{PK_ERR_INVALID_ARGUMENT, "unknown family '" + c.family + "'"};
  }
  return ModelPtr(m);
}

pk_run_params run_params(const RunConfig& c) {
  pk_run_params p = pk_run_params_default();
  p.replications = c.reps;
  p.seed = c.seed;
  p.policy.initial_horizon = c.initial_horizon;
  p.policy.max_horizon = c.max_horizon;
  p.policy.growth = c.growth;
  p.policy.stability = c.stability;
  p.horizon_time = c.horizon;
  p.mesh = c.mesh;
  p.window = c.window;
  p.refine = c.refine;
  return p;
}

std::vector<pk_method> parse_methods(const std::string& names) {
  std::vector<pk_method> out;
  std::istringstream is(names);
  std::string name;
  while (std::getline(is, name, ',')) {
    if (name.empty()) continue;
    pk_method m;
    if (pk_method_parse(name.c_str(), &m) != PK_OK)
      throw ApiError{PK_ERR_INVALID_ARGUMENT, "unknown method '" + name + "'"};
    out.push_back(m);
  }
  if (out.empty()) throw ApiError{PK_ERR_INVALID_ARGUMENT, "no method given"};
  return out;
}

}  // namespace pkcli
