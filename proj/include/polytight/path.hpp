#pragma once

// Assembly of full paths from a contact set and independent conditioned
// excursions, and the diffusive rescaling onto [0, 1].

#include "polytight/contact_set.hpp"
#include "polytight/rng.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace polytight {

/// Integer path y_1..y_N with y_0 := 0 and increments in {-1, 0, +1}.
class LatticePath {
 public:
  LatticePath() = default;
  explicit LatticePath(std::vector<int> values);

  int size() const { return static_cast<int>(values_.size()); }
  std::span<const int> values() const { return values_; }
  /// y_i for i = 0..N.
  int at(int i) const { return i == 0 ? 0 : values_[static_cast<std::size_t>(i - 1)]; }

  /// {l in 1..N : y_l = 0}.
  ContactSet zero_set() const;

  friend bool operator==(const LatticePath&, const LatticePath&) = default;

 private:
  std::vector<int> values_;
};

struct AssemblyOptions {
  /// Give every bulk excursion an independent fair sign; the final excursion
  /// stays positive. Off by default: the assembled object is then the
  /// nonnegative (absolute value) path.
  bool random_signs = false;
};

struct Polymer {
  ContactSet contacts;
  LatticePath path;
};

/// Draws a contact set from `law`, then one bulk excursion per gap and a final
/// excursion after the last contact (when it is before N).
Polymer sample_polymer(const ContactSetLaw& law, Rng& rng,
                       const AssemblyOptions& options = {});

constexpr int kMaxOracleSize = 16;

/// Probability of the nonnegative path under the composite measure. Paths with
/// negative entries or non-lattice steps get zero. N is limited to
/// kMaxOracleSize.
double exact_path_probability(const ContactSetLaw& law,
                              std::span<const int> path);

/// Piecewise-linear interpolation of y_i / sqrt(N) on the grid i / N.
class RescaledPath {
 public:
  explicit RescaledPath(const LatticePath& path);

  int size() const { return n_; }
  const Eigen::ArrayXd& grid_values() const { return grid_; }
  /// y_0..y_N as integers, the source of the zero set.
  std::span<const int> lattice() const { return lattice_; }

  /// X_t for t in [0, 1]; throws std::domain_error outside.
  double operator()(double t) const;

 private:
  int n_;
  std::vector<int> lattice_;
  Eigen::ArrayXd grid_;
};

RescaledPath rescale(const LatticePath& path);

}  // namespace polytight
