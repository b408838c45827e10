#include "polytight/walk.hpp"

#include "polytight/rational.hpp"

#include <numbers>

namespace polytight {

double local_clt_deviation(const WalkParams& params, int k) {
  if (k < 1) throw std::invalid_argument("horizon must be at least 1");
  const ArrayX<double> slice = pmf_slice(params, k);
  const double scale = params.sigma() * std::sqrt(static_cast<double>(k));
  const double density = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int b = -k; b <= k; ++b) {
    const double z = b / scale;
    const double gap =
        std::abs(scale * slice(b + k) - density * std::exp(-0.5 * z * z));
    worst = std::max(worst, gap);
  }
  return worst;
}

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return Rational(text.substr(0, slash)) / Rational(text.substr(slash + 1));
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(text);
  std::string digits = text.substr(0, dot) + text.substr(dot + 1);
  const auto decimals = text.size() - dot - 1;
  Rational denominator(1);
  for (std::size_t i = 0; i < decimals; ++i) denominator *= 10;
  return Rational(digits) / denominator;
}

}  // namespace polytight
