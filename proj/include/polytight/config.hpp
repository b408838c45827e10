#pragma once

// Run configuration shared by every CLI command. A config is one JSON object;
// the sidecar written next to each output wraps it as {"config": {...}} and
// is accepted back as input.

#include "polytight/contact_set.hpp"
#include "polytight/ensemble.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace polytight {

/// Invalid configuration; `field` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct FamilyConfig {
  std::string type = "homogeneous";  // homogeneous|periodic|disordered|custom
  double beta = 0.0;
  std::vector<double> betas;         // periodic
  double lambda = 0.0;               // disordered
  std::string charge_law = "rademacher";
  std::string charges_file;
  std::uint64_t charges_seed = 0;
  std::string weights_file;          // custom
};

struct RunConfig {
  std::string p = "0.3";  // kept as text so rational mode can read it exactly
  FamilyConfig family;
  std::vector<int> n_list{100};
  int replicas = 1000;
  std::uint64_t seed = 1;
  std::vector<double> delta_grid{0.5,    0.25,    0.125,    0.0625,
                                 0.03125, 0.015625, 0.0078125, 0.00390625};
  double gamma = 0.5;
  std::vector<double> a_grid;  // default 0.25 j for j = 0..40
  int n_min = 2;
  int n_max = 200;
  std::vector<int> ck_n{1000, 2000, 3000, 6000};
  std::vector<double> quantiles{0.5, 0.9, 0.99};
  int samples = 10000;
  std::string mode = "exact";  // exact|mc
  bool rational = false;
  bool random_signs = false;
  std::string format = "csv";  // csv|binary
  int batch = 10000;
  double tolerance = 1e-10;
  std::string out = ".";
  unsigned workers = 0;  // 0: machine parallelism; never written to sidecars

  RunConfig();

  double p_value() const;
  WalkParams walk() const;
  /// Family for size n; custom weights and charge files are read here.
  Family family_for(int n) const;
  EnsembleSpec ensemble_spec() const;
  unsigned resolved_workers() const;
};

/// Throws ConfigError naming the first invalid field.
void validate(const RunConfig& config);

/// Reads a plain config object or a sidecar {"config": {...}}. Missing
/// fields keep their defaults; unknown fields are rejected.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& file);

/// Every field except `workers`.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace polytight
