#include "polytight/ensemble.hpp"

#include "polytight/csv.hpp"
#include "polytight/diagnostics.hpp"
#include "polytight/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

namespace polytight {

namespace {

void require_nonempty(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
}

void require_replicas(int replicas) {
  if (replicas < 1) throw std::invalid_argument("replica count must be >= 1");
}

// Gamma and Gamma~ for every replica and delta, row-major by replica.
struct ModulusSamples {
  std::vector<double> plain;
  std::vector<double> modified;
};

ModulusSamples sample_moduli(const EnsembleSpec& spec, int n,
                             std::span<const double> delta_grid, int replicas) {
  const auto law = make_law(n, spec.family, spec.walk);
  const std::size_t width = delta_grid.size();
  ModulusSamples out;
  out.plain.resize(static_cast<std::size_t>(replicas) * width);
  out.modified.resize(out.plain.size());
  parallel_for(static_cast<std::size_t>(replicas), spec.workers, [&](std::size_t r) {
    const RescaledPath path(ensemble_path(spec, law, r));
    for (std::size_t k = 0; k < width; ++k) {
      out.plain[r * width + k] = modulus(path, delta_grid[k]);
      out.modified[r * width + k] = modified_modulus(path, delta_grid[k]);
    }
  });
  return out;
}

}  // namespace

LatticePath ensemble_path(const EnsembleSpec& spec, const ContactSetLaw& law,
                          std::uint64_t replica) {
  Rng rng = make_stream(spec.seed, replica, static_cast<std::uint64_t>(law.size()));
  return sample_polymer(law, rng, spec.assembly).path;
}

std::vector<TightnessRow> tightness_sweep(const EnsembleSpec& spec,
                                          std::span<const int> n_list,
                                          std::span<const double> delta_grid,
                                          double gamma, int replicas) {
  if (n_list.empty()) throw std::invalid_argument("N list is empty");
  require_nonempty(delta_grid, "delta");
  require_replicas(replicas);
  std::vector<TightnessRow> rows;
  const double count = replicas;
  for (int n : n_list) {
    const auto samples = sample_moduli(spec, n, delta_grid, replicas);
    for (std::size_t k = 0; k < delta_grid.size(); ++k) {
      long long plain = 0;
      long long modified = 0;
      for (int r = 0; r < replicas; ++r) {
        const std::size_t at = static_cast<std::size_t>(r) * delta_grid.size() + k;
        plain += samples.plain[at] > gamma;
        modified += samples.modified[at] > gamma;
      }
      const double q = plain / count;
      const double qm = modified / count;
      rows.push_back({n, delta_grid[k], gamma, q, std::sqrt(q * (1 - q) / count), qm,
                      std::sqrt(qm * (1 - qm) / count)});
    }
  }
  return rows;
}

std::vector<ModulusQuantile> modulus_curves(const EnsembleSpec& spec, int n,
                                            std::span<const double> delta_grid,
                                            std::span<const double> levels,
                                            int replicas) {
  require_nonempty(delta_grid, "delta");
  require_nonempty(levels, "quantile");
  require_replicas(replicas);
  for (double level : levels) {
    if (!(level > 0.0 && level <= 1.0)) {
      throw std::invalid_argument("quantile levels must lie in (0, 1]");
    }
  }
  const auto samples = sample_moduli(spec, n, delta_grid, replicas);
  const std::size_t width = delta_grid.size();
  std::vector<ModulusQuantile> out;
  std::vector<double> plain(static_cast<std::size_t>(replicas));
  std::vector<double> modified(plain.size());
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t r = 0; r < plain.size(); ++r) {
      plain[r] = samples.plain[r * width + k];
      modified[r] = samples.modified[r * width + k];
    }
    std::sort(plain.begin(), plain.end());
    std::sort(modified.begin(), modified.end());
    for (double level : levels) {
      const auto rank = static_cast<std::size_t>(
          std::max(1.0, std::ceil(level * replicas)) - 1);
      out.push_back({n, delta_grid[k], level, plain[rank], modified[rank]});
    }
  }
  return out;
}

SandwichReport sandwich_check(const EnsembleSpec& spec, int n,
                              std::span<const double> delta_grid, int replicas) {
  require_nonempty(delta_grid, "delta");
  require_replicas(replicas);
  const auto samples = sample_moduli(spec, n, delta_grid, replicas);
  const std::size_t width = delta_grid.size();
  SandwichReport report;
  for (std::size_t r = 0; r < static_cast<std::size_t>(replicas); ++r) {
    for (std::size_t k = 0; k < width; ++k) {
      const double g = samples.plain[r * width + k];
      const double gm = samples.modified[r * width + k];
      ++report.checks;
      if (!(gm <= g && g <= 2 * gm)) ++report.violations;
      if (k > 0 && (g < samples.plain[r * width + k - 1] ||
                    gm < samples.modified[r * width + k - 1])) {
        ++report.monotonicity_violations;
      }
    }
  }
  return report;
}

void write_ensemble(std::ostream& out, const EnsembleSpec& spec, int n,
                    int replicas, EnsembleFormat format, int batch) {
  require_replicas(replicas);
  if (batch < 1) throw std::invalid_argument("batch size must be >= 1");
  const auto law = make_law(n, spec.family, spec.walk);
  if (format == EnsembleFormat::csv) out << "replica,i,y\n";
  std::vector<LatticePath> buffer;
  for (int start = 0; start < replicas; start += batch) {
    const int size = std::min(batch, replicas - start);
    buffer.assign(static_cast<std::size_t>(size), LatticePath{});
    parallel_for(static_cast<std::size_t>(size), spec.workers, [&](std::size_t k) {
      buffer[k] = ensemble_path(spec, law, static_cast<std::uint64_t>(start) + k);
    });
    for (int k = 0; k < size; ++k) {
      const auto values = buffer[static_cast<std::size_t>(k)].values();
      if (format == EnsembleFormat::csv) {
        const std::string replica = format_number(start + k);
        for (int i = 0; i < n; ++i) {
          out << replica << ',' << (i + 1) << ','
              << values[static_cast<std::size_t>(i)] << '\n';
        }
      } else {
        for (int y : values) {
          auto word = static_cast<std::uint32_t>(y);
          if constexpr (std::endian::native == std::endian::big) {
            word = __builtin_bswap32(word);
          }
          char bytes[4];
          std::memcpy(bytes, &word, 4);
          out.write(bytes, 4);
        }
      }
    }
  }
}

}  // namespace polytight
