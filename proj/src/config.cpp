#include "polytight/config.hpp"

#include "polytight/csv.hpp"
#include "polytight/diagnostics.hpp"
#include "polytight/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace polytight {

using nlohmann::json;

RunConfig::RunConfig() {
  for (int j = 0; j <= 40; ++j) a_grid.push_back(0.25 * j);
}

double RunConfig::p_value() const {
  const auto slash = p.find('/');
  try {
    if (slash == std::string::npos) return parse_double(p);
    return parse_double(p.substr(0, slash)) / parse_double(p.substr(slash + 1));
  } catch (const std::invalid_argument&) {
    throw ConfigError("p", "not a number: " + p);
  }
}

WalkParams RunConfig::walk() const {
  const double value = p_value();
  if (!(value > 0.0 && value <= 0.5)) {
    throw ConfigError("p", "must lie in (0, 1/2], got " + p);
  }
  return WalkParams(value);
}

namespace {

std::ifstream open_input(const std::string& file, const std::string& field) {
  std::ifstream in(file);
  if (!in) throw ConfigError(field, "cannot open " + file);
  return in;
}

}  // namespace

Family RunConfig::family_for(int n) const {
  if (family.type == "homogeneous") return Homogeneous{family.beta};
  if (family.type == "periodic") return Periodic{family.betas};
  if (family.type == "disordered") {
    Disordered dis{family.beta, family.lambda, family.charges_seed,
                   family.charge_law == "gaussian" ? ChargeLaw::gaussian
                                                   : ChargeLaw::rademacher,
                   {}};
    if (!family.charges_file.empty()) {
      auto in = open_input(family.charges_file, "family.charges_file");
      dis.charges = load_charges(in);
    }
    return dis;
  }
  auto in = open_input(family.weights_file, "family.weights_file");
  return load_custom_weights(in, n);
}

EnsembleSpec RunConfig::ensemble_spec() const {
  EnsembleSpec spec;
  spec.walk = walk();
  spec.seed = seed;
  spec.assembly.random_signs = random_signs;
  spec.workers = resolved_workers();
  return spec;
}

unsigned RunConfig::resolved_workers() const {
  return workers == 0 ? default_workers() : workers;
}

void validate(const RunConfig& c) {
  c.walk();
  const std::set<std::string> types{"homogeneous", "periodic", "disordered", "custom"};
  if (!types.contains(c.family.type)) {
    throw ConfigError("family.type", "unknown family '" + c.family.type + "'");
  }
  if (!std::isfinite(c.family.beta)) throw ConfigError("family.beta", "must be finite");
  if (!std::isfinite(c.family.lambda)) throw ConfigError("family.lambda", "must be finite");
  if (c.family.type == "periodic" && c.family.betas.empty()) {
    throw ConfigError("family.betas", "periodic family needs at least one value");
  }
  for (double b : c.family.betas) {
    if (!std::isfinite(b)) throw ConfigError("family.betas", "must be finite");
  }
  if (c.family.charge_law != "rademacher" && c.family.charge_law != "gaussian") {
    throw ConfigError("family.charge_law", "must be rademacher or gaussian");
  }
  if (c.family.type == "custom") {
    if (c.family.weights_file.empty()) {
      throw ConfigError("family.weights_file", "custom family needs a weights file");
    }
    if (c.n_list.size() != 1) {
      throw ConfigError("n_list", "custom weights fix a single N");
    }
  }
  if (c.n_list.empty()) throw ConfigError("n_list", "must not be empty");
  for (int n : c.n_list) {
    if (n < 1) throw ConfigError("n_list", "sizes must be >= 1");
  }
  if (c.replicas < 1) throw ConfigError("replicas", "must be >= 1");
  if (c.delta_grid.empty()) throw ConfigError("delta_grid", "must not be empty");
  for (double d : c.delta_grid) {
    if (!(d > 0.0 && d <= 1.0)) throw ConfigError("delta_grid", "values must lie in (0, 1]");
  }
  if (!std::is_sorted(c.delta_grid.begin(), c.delta_grid.end(), std::greater<>())) {
    throw ConfigError("delta_grid", "must be in decreasing order");
  }
  if (!std::isfinite(c.gamma) || c.gamma < 0.0) {
    throw ConfigError("gamma", "must be finite and nonnegative");
  }
  if (c.a_grid.empty()) throw ConfigError("a_grid", "must not be empty");
  for (double a : c.a_grid) {
    if (!std::isfinite(a) || a < 0.0) throw ConfigError("a_grid", "values must be >= 0");
  }
  if (!std::is_sorted(c.a_grid.begin(), c.a_grid.end())) {
    throw ConfigError("a_grid", "must be in increasing order");
  }
  if (c.n_min < 1) throw ConfigError("n_min", "must be >= 1");
  if (c.n_max < c.n_min) throw ConfigError("n_max", "must be >= n_min");
  if (c.ck_n.empty()) throw ConfigError("ck_n", "must not be empty");
  for (int n : c.ck_n) {
    if (n < 1) throw ConfigError("ck_n", "values must be >= 1");
  }
  if (c.quantiles.empty()) throw ConfigError("quantiles", "must not be empty");
  for (double q : c.quantiles) {
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("quantiles", "values must lie in (0, 1]");
  }
  if (c.samples < 2) throw ConfigError("samples", "must be >= 2");
  if (c.mode != "exact" && c.mode != "mc") throw ConfigError("mode", "must be exact or mc");
  if (c.mode == "exact" && c.n_max > kMaxExactExcursion) {
    throw ConfigError("n_max", "exact mode supports n_max <= " +
                                   std::to_string(kMaxExactExcursion));
  }
  if (c.format != "csv" && c.format != "binary") {
    throw ConfigError("format", "must be csv or binary");
  }
  if (c.batch < 1) throw ConfigError("batch", "must be >= 1");
  if (!(c.tolerance >= 0.0)) throw ConfigError("tolerance", "must be >= 0");
  if (c.out.empty()) throw ConfigError("out", "must not be empty");
}

namespace {

template <typename T>
void read(const json& doc, const char* key, T& target, const std::string& prefix = "") {
  const auto it = doc.find(key);
  if (it == doc.end()) return;
  try {
    target = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(prefix + key, "has the wrong type");
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& known,
                    const std::string& prefix) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw ConfigError(prefix + key, "unknown field");
  }
}

}  // namespace

RunConfig config_from_json(const json& input) {
  const json& doc = input.contains("config") ? input.at("config") : input;
  if (!doc.is_object()) throw ConfigError("config", "must be a JSON object");
  reject_unknown(doc,
                 {"p", "family", "n_list", "replicas", "seed", "delta_grid", "gamma",
                  "a_grid", "n_min", "n_max", "ck_n", "quantiles", "samples", "mode",
                  "rational", "random_signs", "format", "batch", "tolerance", "out",
                  "workers"},
                 "");
  RunConfig c;
  if (const auto it = doc.find("p"); it != doc.end()) {
    if (it->is_number()) {
      c.p = format_number(it->get<double>());
    } else if (it->is_string()) {
      c.p = it->get<std::string>();
    } else {
      throw ConfigError("p", "must be a number or a fraction string");
    }
  }
  if (const auto it = doc.find("family"); it != doc.end()) {
    if (!it->is_object()) throw ConfigError("family", "must be an object");
    reject_unknown(*it,
                   {"type", "beta", "betas", "lambda", "charge_law", "charges_file",
                    "charges_seed", "weights_file"},
                   "family.");
    read(*it, "type", c.family.type, "family.");
    read(*it, "beta", c.family.beta, "family.");
    read(*it, "betas", c.family.betas, "family.");
    read(*it, "lambda", c.family.lambda, "family.");
    read(*it, "charge_law", c.family.charge_law, "family.");
    read(*it, "charges_file", c.family.charges_file, "family.");
    read(*it, "charges_seed", c.family.charges_seed, "family.");
    read(*it, "weights_file", c.family.weights_file, "family.");
  }
  read(doc, "n_list", c.n_list);
  read(doc, "replicas", c.replicas);
  read(doc, "seed", c.seed);
  read(doc, "delta_grid", c.delta_grid);
  read(doc, "gamma", c.gamma);
  read(doc, "a_grid", c.a_grid);
  read(doc, "n_min", c.n_min);
  read(doc, "n_max", c.n_max);
  read(doc, "ck_n", c.ck_n);
  read(doc, "quantiles", c.quantiles);
  read(doc, "samples", c.samples);
  read(doc, "mode", c.mode);
  read(doc, "rational", c.rational);
  read(doc, "random_signs", c.random_signs);
  read(doc, "format", c.format);
  read(doc, "batch", c.batch);
  read(doc, "tolerance", c.tolerance);
  read(doc, "out", c.out);
  read(doc, "workers", c.workers);
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot open " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const RunConfig& c) {
  json family{{"type", c.family.type},
              {"beta", c.family.beta},
              {"betas", c.family.betas},
              {"lambda", c.family.lambda},
              {"charge_law", c.family.charge_law},
              {"charges_file", c.family.charges_file},
              {"charges_seed", c.family.charges_seed},
              {"weights_file", c.family.weights_file}};
  return json{{"p", c.p},
              {"family", family},
              {"n_list", c.n_list},
              {"replicas", c.replicas},
              {"seed", c.seed},
              {"delta_grid", c.delta_grid},
              {"gamma", c.gamma},
              {"a_grid", c.a_grid},
              {"n_min", c.n_min},
              {"n_max", c.n_max},
              {"ck_n", c.ck_n},
              {"quantiles", c.quantiles},
              {"samples", c.samples},
              {"mode", c.mode},
              {"rational", c.rational},
              {"random_signs", c.random_signs},
              {"format", c.format},
              {"batch", c.batch},
              {"tolerance", c.tolerance},
              {"out", c.out}};
}

}  // namespace polytight
