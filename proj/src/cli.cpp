#include "polytight/cli.hpp"

#include "polytight/config.hpp"
#include "polytight/csv.hpp"
#include "polytight/diagnostics.hpp"
#include "polytight/ensemble.hpp"
#include "polytight/oracle.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

namespace polytight {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::optional<std::string> mode;
  bool rational = false;
  bool random_signs = false;
  std::optional<std::string> p;
  std::optional<std::string> family;
  std::optional<double> beta;
  std::optional<double> lambda;
  std::vector<int> n_list;
  std::optional<int> replicas;
  std::vector<double> delta_grid;
  std::optional<double> gamma;
  std::vector<double> a_grid;
  std::optional<int> n_min;
  std::optional<int> n_max;
  std::vector<int> ck_n;
  std::vector<double> quantiles;
  std::optional<int> samples;
  std::optional<std::string> format;
};

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_file.empty() ? RunConfig{} : load_config(o.config_file);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out = *o.out;
  if (o.workers) c.workers = *o.workers;
  if (o.mode) c.mode = *o.mode;
  if (o.rational) c.rational = true;
  if (o.random_signs) c.random_signs = true;
  if (o.p) c.p = *o.p;
  if (o.family) c.family.type = *o.family;
  if (o.beta) c.family.beta = *o.beta;
  if (o.lambda) c.family.lambda = *o.lambda;
  if (!o.n_list.empty()) c.n_list = o.n_list;
  if (o.replicas) c.replicas = *o.replicas;
  if (!o.delta_grid.empty()) c.delta_grid = o.delta_grid;
  if (o.gamma) c.gamma = *o.gamma;
  if (!o.a_grid.empty()) c.a_grid = o.a_grid;
  if (o.n_min) c.n_min = *o.n_min;
  if (o.n_max) c.n_max = *o.n_max;
  if (!o.ck_n.empty()) c.ck_n = o.ck_n;
  if (!o.quantiles.empty()) c.quantiles = o.quantiles;
  if (o.samples) c.samples = *o.samples;
  if (o.format) c.format = *o.format;
  validate(c);
  return c;
}

class Outputs {
 public:
  Outputs(const RunConfig& config, std::string command, std::ostream& log)
      : dir_(config.out), config_(config_to_json(config)),
        command_(std::move(command)), log_(log) {
    fs::create_directories(dir_);
  }

  // Writes `name` through `body` and its sidecar <stem>.json.
  void write(const std::string& name, const std::function<void(std::ostream&)>& body,
             const json& summary = json::object()) {
    const fs::path file = dir_ / name;
    {
      std::ofstream out(file, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + file.string());
      body(out);
      if (!out) throw std::runtime_error("write failed for " + file.string());
    }
    json sidecar{{"command", command_},
                 {"output", name},
                 {"config", config_},
                 {"summary", summary}};
    std::ofstream meta(fs::path(file).replace_extension(".json"), std::ios::binary);
    meta << sidecar.dump(2) << '\n';
    log_ << "wrote " << file.string() << '\n';
  }

 private:
  fs::path dir_;
  json config_;
  std::string command_;
  std::ostream& log_;
};

ContactSetLaw law_for(const RunConfig& c, int n) {
  return make_law(n, c.family_for(n), c.walk());
}

int cmd_sample(const RunConfig& c, std::ostream& log) {
  const int n = c.n_list.front();
  const auto law = law_for(c, n);
  const auto spec = c.ensemble_spec();
  const LatticePath path = ensemble_path(spec, law, 0);
  const ContactSet zeros = path.zero_set();
  Outputs(c, "sample", log)
      .write("sample.csv",
             [&](std::ostream& out) {
               CsvWriter csv(out, {"i", "y"});
               for (int i = 0; i <= n; ++i) csv.row(i, path.at(i));
             },
             {{"n", n}, {"contacts", zeros.contacts.size()}});
  return kExitOk;
}

int cmd_ensemble(const RunConfig& c, std::ostream& log) {
  Outputs outputs(c, "ensemble", log);
  const auto spec = c.ensemble_spec();
  const bool binary = c.format == "binary";
  for (int n : c.n_list) {
    EnsembleSpec sized = spec;
    sized.family = c.family_for(n);
    const std::string name =
        "ensemble_N" + std::to_string(n) + (binary ? ".bin" : ".csv");
    json summary{{"n", n}, {"replicas", c.replicas}, {"format", c.format}};
    if (binary) summary["layout"] = "int32 little-endian, N values per replica, replica-major";
    outputs.write(
        name,
        [&](std::ostream& out) {
          write_ensemble(out, sized, n, c.replicas,
                         binary ? EnsembleFormat::binary : EnsembleFormat::csv, c.batch);
        },
        summary);
  }
  return kExitOk;
}

int cmd_modulus(const RunConfig& c, std::ostream& log) {
  Outputs(c, "diagnose modulus", log)
      .write("modulus.csv", [&](std::ostream& out) {
        CsvWriter csv(out, {"N", "delta", "quantile", "modulus", "modified_modulus"});
        for (int n : c.n_list) {
          EnsembleSpec spec = c.ensemble_spec();
          spec.family = c.family_for(n);
          for (const auto& q : modulus_curves(spec, n, c.delta_grid, c.quantiles, c.replicas)) {
            csv.row(q.n, q.delta, q.level, q.modulus, q.modified);
          }
        }
      });
  return kExitOk;
}

int cmd_c_of_a(const RunConfig& c, std::ostream& log) {
  const WalkParams walk = c.walk();
  Outputs outputs(c, "diagnose c-of-a", log);
  std::vector<SupValue> sup(c.a_grid.size());
  std::vector<std::vector<Estimate>> rows;  // per n, per a
  std::vector<int> sizes;
  if (c.mode == "exact") {
    const CTable table = c_table(walk, c.n_max, c.a_grid);
    sup = table.sup;
    for (int n = 1; n <= c.n_max; ++n) {
      sizes.push_back(n);
      auto& row = rows.emplace_back();
      for (std::size_t k = 0; k < c.a_grid.size(); ++k) {
        row.push_back({table.values(n - 1, static_cast<Eigen::Index>(k)), 0.0});
      }
    }
  } else {
    for (int n : c.n_list) {
      sizes.push_back(n);
      auto& row = rows.emplace_back();
      for (std::size_t k = 0; k < c.a_grid.size(); ++k) {
        // Common random numbers across a keep the estimate monotone in a.
        Rng rng = make_stream(c.seed, 0, static_cast<std::uint64_t>(n));
        row.push_back(c_of_a_mc(walk, n, c.a_grid[k], c.samples, rng));
        if (row.back().value > sup[k].value) sup[k] = {row.back().value, n};
      }
    }
  }
  outputs.write("c_of_a.csv", [&](std::ostream& out) {
    CsvWriter csv(out, {"n", "a", "value", "std_error"});
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      for (std::size_t k = 0; k < c.a_grid.size(); ++k) {
        csv.row(sizes[i], c.a_grid[k], rows[i][k].value, rows[i][k].std_error);
      }
    }
  });
  const int n_max = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
  outputs.write(
      "c_sup.csv",
      [&](std::ostream& out) {
        CsvWriter csv(out, {"a", "value", "argmax", "n_max"});
        for (std::size_t k = 0; k < c.a_grid.size(); ++k) {
          csv.row(c.a_grid[k], sup[k].value, sup[k].argmax, n_max);
        }
      },
      {{"n_max", n_max}, {"mode", c.mode}});
  return kExitOk;
}

int cmd_lemma(const RunConfig& c, std::ostream& log) {
  if (c.n_min < 2) throw ConfigError("n_min", "lemma tables start at n = 2");
  const WalkParams walk = c.walk();
  LemmaMax best;
  Outputs outputs(c, "diagnose lemma", log);
  outputs.write("lemma.csv", [&](std::ostream& out) {
    CsvWriter csv(out, {"n", "a", "f", "scaled"});
    for (int n = c.n_min; n <= c.n_max; ++n) {
      std::map<int, double> tails;
      for (double a : c.a_grid) {
        const int h = height_threshold(n, a, false);
        auto it = tails.find(h);
        if (it == tails.end()) it = tails.emplace(h, max_height_tail(walk, n, h)).first;
        const double scaled = it->second * (1.0 + a * a);
        csv.row(n, a, it->second, scaled);
        if (scaled > best.value) best = {scaled, n, a};
      }
    }
  });
  outputs.write(
      "lemma_max.csv",
      [&](std::ostream& out) {
        CsvWriter csv(out, {"n_min", "n_max", "value", "n", "a"});
        csv.row(c.n_min, c.n_max, best.value, best.n, best.a);
      },
      {{"value", best.value}, {"n", best.n}, {"a", best.a}});
  return kExitOk;
}

int cmd_ck(const RunConfig& c, std::ostream& log) {
  const auto series = ck_series(c.walk(), c.ck_n);
  const auto ratios = ck_doubling_ratios(series);
  Outputs outputs(c, "diagnose ck", log);
  outputs.write("ck.csv", [&](std::ostream& out) {
    CsvWriter csv(out, {"n", "value"});
    for (const auto& point : series) csv.row(point.n, point.value);
  });
  outputs.write("ck_ratio.csv", [&](std::ostream& out) {
    CsvWriter csv(out, {"n", "ratio"});
    for (const auto& r : ratios) csv.row(r.n, r.ratio);
  });
  return kExitOk;
}

int cmd_tightness(const RunConfig& c, std::ostream& log) {
  std::vector<TightnessRow> rows;
  for (int n : c.n_list) {
    EnsembleSpec spec = c.ensemble_spec();
    spec.family = c.family_for(n);
    const int sizes[] = {n};
    for (auto& row : tightness_sweep(spec, sizes, c.delta_grid, c.gamma, c.replicas)) {
      rows.push_back(row);
    }
  }
  Outputs(c, "diagnose tightness", log)
      .write("tightness.csv", [&](std::ostream& out) {
        CsvWriter csv(out, {"N", "delta", "gamma", "exceedance", "stderr",
                            "modified_exceedance", "modified_stderr"});
        for (const auto& r : rows) {
          csv.row(r.n, r.delta, r.gamma, r.exceedance, r.std_error,
                  r.modified_exceedance, r.modified_std_error);
        }
      });
  return kExitOk;
}

int cmd_oracle(const RunConfig& c, std::ostream& log) {
  for (int n : c.n_list) {
    if (n > 12) throw ConfigError("n_list", "oracle enumeration supports N <= 12");
  }
  OracleOptions options;
  options.tolerance = c.tolerance;
  options.rational = c.rational;
  options.rational_p = c.p;
  std::vector<std::pair<int, OracleCheck>> results;
  for (int n : c.n_list) {
    for (auto& check : run_oracle(law_for(c, n), options)) results.emplace_back(n, check);
  }
  bool passed = true;
  double worst = 0.0;
  for (const auto& [n, check] : results) {
    passed = passed && check.passed();
    worst = std::max(worst, check.deviation);
    if (!check.passed()) {
      log << "oracle mismatch: N=" << n << ' ' << check.name << " deviation "
          << format_number(check.deviation) << " > " << format_number(check.tolerance)
          << '\n';
    }
  }
  Outputs(c, "oracle", log)
      .write(
          "oracle.csv",
          [&](std::ostream& out) {
            CsvWriter csv(out, {"N", "check", "deviation", "tolerance", "passed"});
            for (const auto& [n, check] : results) {
              csv.row(n, check.name, check.deviation, check.tolerance,
                      check.passed() ? 1 : 0);
            }
          },
          {{"passed", passed}, {"max_deviation", worst}});
  log << "oracle: " << (passed ? "pass" : "FAIL") << " (max deviation "
      << format_number(worst) << ")\n";
  return passed ? kExitOk : kExitOracle;
}

int cmd_partition(const RunConfig& c, std::ostream& log) {
  Outputs outputs(c, "partition", log);
  for (int n : c.n_list) {
    const auto law = law_for(c, n);
    const PartitionTable& table = partition_function(law);
    outputs.write(
        "partition_N" + std::to_string(n) + ".csv",
        [&](std::ostream& out) {
          CsvWriter csv(out, {"j", "log_z"});
          for (int j = 0; j <= n; ++j) csv.row(j, table.log_z(j));
        },
        {{"n", n}, {"log_total", table.log_total}, {"log_space", table.log_space}});
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pinned lattice polymer sampler and tightness diagnostics", "polytight"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config_file, "JSON config or sidecar file");
  app.add_option("--seed", o.seed, "master seed");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--workers", o.workers, "worker threads (default: all cores)");
  app.add_option("--mode", o.mode, "exact or mc");
  app.add_flag("--rational", o.rational, "add exact rational checks to oracle runs");
  app.add_flag("--random-signs", o.random_signs, "flip each bulk excursion with probability 1/2");
  app.add_option("--p", o.p, "walk parameter, decimal or fraction");
  app.add_option("--family", o.family, "homogeneous|periodic|disordered|custom");
  app.add_option("--beta", o.beta, "pinning strength");
  app.add_option("--lambda", o.lambda, "disorder strength");
  app.add_option("--N", o.n_list, "system sizes");
  app.add_option("--replicas", o.replicas, "replicas per size");
  app.add_option("--delta", o.delta_grid, "delta grid, decreasing");
  app.add_option("--gamma", o.gamma, "oscillation threshold");
  app.add_option("--a", o.a_grid, "a grid, increasing");
  app.add_option("--n-min", o.n_min, "smallest excursion length");
  app.add_option("--n-max", o.n_max, "largest excursion length");
  app.add_option("--ck-n", o.ck_n, "first passage horizons");
  app.add_option("--quantiles", o.quantiles, "quantile levels");
  app.add_option("--samples", o.samples, "Monte Carlo samples");
  app.add_option("--format", o.format, "csv or binary");

  std::function<int(const RunConfig&, std::ostream&)> action;
  auto command = [&](const char* name, const char* help, auto fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  command("sample", "draw one path", cmd_sample);
  command("ensemble", "stream a batch of paths", cmd_ensemble);
  command("oracle", "exhaustive enumeration cross-checks (N <= 12)", cmd_oracle);
  command("partition", "dump the partition function table", cmd_partition);
  auto* diagnose = app.add_subcommand("diagnose", "diagnostic tables");
  diagnose->require_subcommand(1);
  diagnose->fallthrough();
  auto sub = [&](const char* name, const char* help, auto fn) {
    auto* s = diagnose->add_subcommand(name, help);
    s->fallthrough();
    s->callback([&action, fn] { action = fn; });
  };
  sub("modulus", "quantiles of both continuity moduli", cmd_modulus);
  sub("c-of-a", "c_n(a) table and its running supremum", cmd_c_of_a);
  sub("lemma", "f_n(a) and f_n(a)(1 + a^2)", cmd_lemma);
  sub("ck", "n^{3/2} P(T = n) and doubling ratios", cmd_ck);
  sub("tightness", "exceedance frequencies of both moduli", cmd_tightness);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig config = resolve(o);
    return action(config, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace polytight
