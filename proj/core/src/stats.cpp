#include "betatails/stats.hpp"

#include "betatails/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace betatails::stats {

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  if (successes > trials) throw std::invalid_argument("wilson_interval: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  // Clamp so the estimate always lies inside despite rounding at p = 0 or 1.
  return {std::min(p, std::max(0.0, centre - half)), std::max(p, std::min(1.0, centre + half))};
}

bool usable_for_fit(const TailPoint& p) {
  return p.p_hat * static_cast<double>(p.reps) > 10.0 && p.p_hat < 0.5;
}

FitResult fit_exponent(const TailCurve& curve, FitMode mode) {
  std::vector<double> xs, ys;
  for (const auto& pt : curve.points) {
    if (!usable_for_fit(pt)) continue;
    xs.push_back(std::pow(pt.t, curve.target_power));
    ys.push_back(-std::log(pt.p_hat));
  }
  const std::size_t k = xs.size();
  if (k < 3) throw NumericalError("fit_exponent: fewer than 3 usable points (" + std::to_string(k) + ")");
  FitResult fit{0.0, curve.target_power, 0.0, k, 0.0};
  if (mode == FitMode::through_origin) {
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sxy += xs[i] * ys[i];
      sxx += xs[i] * xs[i];
      syy += ys[i] * ys[i];
    }
    fit.coefficient = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < k; ++i) ss_res += std::pow(ys[i] - fit.coefficient * xs[i], 2);
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  } else {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw NumericalError("fit_exponent: degenerate abscissae");
    fit.coefficient = sxy / sxx;
    fit.intercept = my - fit.coefficient * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  }
  return fit;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi theta form, fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * pi2 / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> a(x.begin(), x.end()), b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

double laguerre_rate_function(double eps, int quad_points) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("laguerre_rate_function: eps must be positive");
  if (quad_points < 1) throw std::invalid_argument("laguerre_rate_function: quad_points must be positive");
  const double pi = std::numbers::pi;
  // y = 2 - 2 cos(theta) maps the Marchenko-Pastur density to (1 + cos theta) / pi on [0, pi],
  // and 4 + eps - y = eps + 4 cos^2(theta / 2) without cancellation near the edge.
  auto integrand = [eps, pi](double theta) {
    const double c = std::cos(0.5 * theta);
    return std::log(eps + 4.0 * c * c) * (2.0 * c * c) / pi;
  };
  // Panels graded geometrically towards theta = pi, where the integrand varies on scale sqrt(eps).
  std::vector<double> cuts{pi};
  for (double s = std::sqrt(eps); s < pi; s *= 2.0) cuts.push_back(pi - s);
  cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  double integral = 0.0;
  // The integrand is analytic on every panel, so a fixed 31-point rule per panel suffices.
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double width = (cuts[k + 1] - cuts[k]) / quad_points;
    for (int q = 0; q < quad_points; ++q) {
      const double a = cuts[k] + q * width;
      integral += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, a + width, 0);
    }
  }
  return -integral + (4.0 + eps) / 2.0 - 1.0;
}

}  // namespace betatails::stats
