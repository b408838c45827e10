#pragma once

// Seeded ensembles of assembled paths and the statistics computed over them.
// Replica r of size N always draws from make_stream(seed, r, N), so results
// do not depend on the number of workers or on the order of evaluation.

#include "polytight/contact_set.hpp"
#include "polytight/path.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace polytight {

struct EnsembleSpec {
  WalkParams walk{0.3};
  Family family = Homogeneous{};
  std::uint64_t seed = 0;
  AssemblyOptions assembly;
  unsigned workers = 1;
};

/// Path of replica `replica` in the size-n ensemble.
LatticePath ensemble_path(const EnsembleSpec& spec, const ContactSetLaw& law,
                          std::uint64_t replica);

struct TightnessRow {
  int n = 0;
  double delta = 0.0;
  double gamma = 0.0;
  double exceedance = 0.0;           // fraction with Gamma(delta) > gamma
  double std_error = 0.0;
  double modified_exceedance = 0.0;  // same for the modified modulus
  double modified_std_error = 0.0;
};

/// Every (N, delta) pair, N outermost, for the given gamma.
std::vector<TightnessRow> tightness_sweep(const EnsembleSpec& spec,
                                          std::span<const int> n_list,
                                          std::span<const double> delta_grid,
                                          double gamma, int replicas);

struct ModulusQuantile {
  int n = 0;
  double delta = 0.0;
  double level = 0.0;
  double modulus = 0.0;
  double modified = 0.0;
};

/// Empirical quantiles (type 1, the smallest order statistic with
/// cumulative frequency >= level) of both moduli over the ensemble.
std::vector<ModulusQuantile> modulus_curves(const EnsembleSpec& spec, int n,
                                            std::span<const double> delta_grid,
                                            std::span<const double> levels,
                                            int replicas);

struct SandwichReport {
  long long checks = 0;
  long long violations = 0;
  long long monotonicity_violations = 0;
};

/// Checks Gamma~ <= Gamma <= 2 Gamma~ and monotonicity in delta on every
/// replica and every delta (delta_grid ascending).
SandwichReport sandwich_check(const EnsembleSpec& spec, int n,
                              std::span<const double> delta_grid, int replicas);

enum class EnsembleFormat { csv, binary };

/// Streams replicas [0, replicas) of size n to `out`, generating `batch`
/// replicas at a time. CSV rows are (replica, i, y) for i = 1..N; the binary
/// layout is N little-endian int32 values per replica, replicas in order.
void write_ensemble(std::ostream& out, const EnsembleSpec& spec, int n,
                    int replicas, EnsembleFormat format, int batch = 10000);

}  // namespace polytight
