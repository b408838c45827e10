#pragma once

// Exact finite-horizon computations for the lazy symmetric walk with steps
// +1 and -1 (probability p each) and 0 (probability 1 - 2p).
//
// Everything here is templated on the scalar so the same dynamic programs run
// in double precision and in exact rational arithmetic (see rational.hpp).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

namespace polytight {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
class BasicWalkParams {
 public:
  explicit BasicWalkParams(Scalar p) : p_(std::move(p)) {
    if (!(p_ > Scalar(0)) || p_ > Scalar(1) / Scalar(2)) {
      throw std::invalid_argument("walk parameter p must lie in (0, 1/2]");
    }
  }

  const Scalar& p() const { return p_; }
  Scalar stay() const { return Scalar(1) - Scalar(2) * p_; }
  Scalar sigma_squared() const { return Scalar(2) * p_; }

  double sigma() const
    requires std::floating_point<Scalar>
  {
    return std::sqrt(static_cast<double>(sigma_squared()));
  }

  friend bool operator==(const BasicWalkParams&,
                         const BasicWalkParams&) = default;

 private:
  Scalar p_;
};

using WalkParams = BasicWalkParams<double>;

template <typename Scalar>
struct StepDistribution {
  Scalar down;
  Scalar stay;
  Scalar up;

  const Scalar& operator[](int step) const {
    switch (step) {
      case -1: return down;
      case 0: return stay;
      case 1: return up;
      default: throw std::out_of_range("step must be -1, 0 or +1");
    }
  }
};

template <typename Scalar>
StepDistribution<Scalar> step_distribution(
    const BasicWalkParams<Scalar>& params) {
  return {params.p(), params.stay(), params.p()};
}

namespace detail {

// One step of the free walk on a slice indexed b + k, b in [-k, k].
// The two neighbour contributions are added before scaling so that the
// result is bitwise symmetric in b.
template <typename Scalar>
ArrayX<Scalar> advance_free(const ArrayX<Scalar>& slice, const Scalar& p,
                            const Scalar& stay) {
  const Eigen::Index width = slice.size() + 2;
  ArrayX<Scalar> padded = ArrayX<Scalar>::Zero(width + 2);
  padded.segment(2, slice.size()) = slice;
  ArrayX<Scalar> next = stay * padded.segment(1, width) +
                        p * (padded.segment(0, width) +
                             padded.segment(2, width));
  return next;
}

// One step of the walk killed on entering {<= 0}. Index x holds level x;
// entry 0 is always zero. Returns the mass absorbed during the step.
template <typename Scalar>
Scalar advance_killed(ArrayX<Scalar>& alive, const Scalar& p,
                      const Scalar& stay) {
  const Eigen::Index n = alive.size();
  Scalar absorbed = p * alive(1);
  ArrayX<Scalar> padded = ArrayX<Scalar>::Zero(n + 3);
  padded.segment(1, n) = alive;
  ArrayX<Scalar> next = stay * padded.segment(1, n + 1) +
                        p * (padded.segment(0, n + 1) +
                             padded.segment(2, n + 1));
  next(0) = Scalar(0);
  alive = std::move(next);
  return absorbed;
}

}  // namespace detail

/// Law of S_k on the full slice [-k, k]; entry b + k holds P(S_k = b).
template <typename Scalar>
ArrayX<Scalar> pmf_slice(const BasicWalkParams<Scalar>& params, int k) {
  if (k < 0) throw std::invalid_argument("horizon must be nonnegative");
  ArrayX<Scalar> slice = ArrayX<Scalar>::Constant(1, Scalar(1));
  const Scalar stay = params.stay();
  for (int step = 0; step < k; ++step) {
    slice = detail::advance_free(slice, params.p(), stay);
  }
  return slice;
}

/// P(S_k = b). Sites with |b| > k carry no mass.
template <typename Scalar>
Scalar exact_pmf(const BasicWalkParams<Scalar>& params, int k, int b) {
  if (k < 0) throw std::invalid_argument("horizon must be nonnegative");
  if (b > k || b < -k) return Scalar(0);
  return pmf_slice(params, k)(b + k);
}

/// P(T = n) for n = 0..n_max (entry 0 is zero), T := inf{m > 0 : S_m <= 0}.
template <typename Scalar>
ArrayX<Scalar> first_passage_series(const BasicWalkParams<Scalar>& params,
                                    int n_max) {
  if (n_max < 1) throw std::invalid_argument("horizon must be at least 1");
  ArrayX<Scalar> series = ArrayX<Scalar>::Zero(n_max + 1);
  const Scalar stay = params.stay();
  series(1) = Scalar(1) - params.p();
  ArrayX<Scalar> alive = ArrayX<Scalar>::Zero(2);
  alive(1) = params.p();
  for (int n = 2; n <= n_max; ++n) {
    series(n) = detail::advance_killed(alive, params.p(), stay);
  }
  return series;
}

template <typename Scalar>
Scalar first_passage_pmf(const BasicWalkParams<Scalar>& params, int n) {
  if (n < 1) throw std::invalid_argument("first passage needs n >= 1");
  return first_passage_series(params, n)(n);
}

/// p^2 [P(S_{n-2} = 0) - P(S_{n-2} = 2)].
template <typename Scalar>
Scalar reflection_first_passage(const BasicWalkParams<Scalar>& params, int n) {
  if (n < 2) throw std::invalid_argument("reflection formula needs n >= 2");
  const ArrayX<Scalar> slice = pmf_slice(params, n - 2);
  const int k = n - 2;
  const Scalar at_two = k >= 2 ? Scalar(slice(k + 2)) : Scalar(0);
  return params.p() * params.p() * (slice(k) - at_two);
}

/// Reflection form of P(S_m = b, T > m) = p [P(S_{m-1} = b-1) - P(S_{m-1} = b+1)].
template <typename Scalar>
Scalar pinned_positive_pmf(const BasicWalkParams<Scalar>& params, int m,
                           int b) {
  if (m < 1) throw std::invalid_argument("pinned probability needs m >= 1");
  if (b < 1) throw std::invalid_argument("endpoint must be positive");
  return params.p() *
         (exact_pmf(params, m - 1, b - 1) - exact_pmf(params, m - 1, b + 1));
}

/// Surviving mass P(S_m = x, T > m) for x = 0..m+1 by the killed DP.
template <typename Scalar>
ArrayX<Scalar> surviving_slice(const BasicWalkParams<Scalar>& params, int m) {
  if (m < 1) throw std::invalid_argument("pinned probability needs m >= 1");
  const Scalar stay = params.stay();
  ArrayX<Scalar> alive = ArrayX<Scalar>::Zero(2);
  alive(1) = params.p();
  for (int step = 1; step < m; ++step) {
    detail::advance_killed(alive, params.p(), stay);
  }
  return alive;
}

/// P(S_m = b, T > m) from the absorbing-boundary DP.
template <typename Scalar>
Scalar pinned_positive_dp(const BasicWalkParams<Scalar>& params, int m,
                          int b) {
  if (b < 1) throw std::invalid_argument("endpoint must be positive");
  const ArrayX<Scalar> alive = surviving_slice(params, m);
  return b < alive.size() ? Scalar(alive(b)) : Scalar(0);
}

/// Probability that the walk started at 1 reaches `barrier` before 0.
/// Solves the absorbing-chain system on the interior states 1..barrier-1.
template <typename Scalar>
Scalar ruin_probability(const BasicWalkParams<Scalar>& params, int barrier) {
  if (barrier < 1) throw std::invalid_argument("barrier must be at least 1");
  if (barrier == 1) return Scalar(1);
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int states = barrier - 1;
  const Scalar p = params.p();
  Matrix system = Matrix::Zero(states, states);
  Vector rhs = Vector::Zero(states);
  for (int i = 0; i < states; ++i) {
    system(i, i) = Scalar(1) - params.stay();
    if (i > 0) system(i, i - 1) = -p;
    if (i + 1 < states) system(i, i + 1) = -p;
  }
  rhs(states - 1) = p;
  const Vector hit = system.partialPivLu().solve(rhs);
  return hit(0);
}

/// max_b | sigma sqrt(k) P(S_k = b) - phi(b / (sigma sqrt(k))) | over b in [-k, k].
/// For p = 1/2 the walk has period two and the deviation does not vanish.
double local_clt_deviation(const WalkParams& params, int k);

}  // namespace polytight
