#include "betatails/profiles.hpp"

#include "betatails/parallel.hpp"
#include "betatails/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betatails::profiles {

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

void require_positive_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("profile: t must be positive");
}

}  // namespace

ProfileVector::ProfileVector(std::vector<double> values, std::size_t n, double t)
    : values_(std::move(values)), n_(n), t_(t) {
  while (!values_.empty() && values_.back() == 0.0) values_.pop_back();
  if (values_.size() > n_) throw std::invalid_argument("ProfileVector: support exceeds n");
  for (double x : values_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("ProfileVector: entries must be finite and nonnegative");
  }
}

double rho_t(double t) {
  require_positive_t(t);
  // Rationalised form of (-1 + sqrt(1 + 4t^2)) / (2t), free of cancellation for small t.
  return 2.0 * t / (1.0 + std::sqrt(1.0 + 4.0 * t * t));
}

double sech_shape(double x, double t) {
  const double rt = std::sqrt(t);
  const double s = sech(rt);
  if (x <= 0.0) return 0.0;
  if (x <= s) return x;
  if (x <= 2.0 * rt + s) return sech(x - rt - s);
  return std::max(0.0, 2.0 * rt + 2.0 * s - x);
}

double left_shape(double x, double t) {
  const double rest = std::max(0.0, t - x);
  return std::max(0.0, std::min({x * std::sqrt(t), std::sqrt(rest), rest}));
}

ProfileVector sech_profile(std::size_t n, double t) {
  require_positive_t(t);
  const double rt = std::sqrt(t);
  const double scale = std::cbrt(static_cast<double>(n)) / rt;  // grid points per unit x
  const double p_real = std::ceil((2.0 * rt + 2.0 * sech(rt)) * scale);
  if (p_real > static_cast<double>(n)) throw std::invalid_argument("sech_profile: support exceeds n, t too large for n");
  const auto p = static_cast<std::size_t>(p_real);
  std::vector<double> v(p);
  for (std::size_t k = 1; k <= p; ++k) v[k - 1] = sech_shape(static_cast<double>(k) / scale, t);
  return ProfileVector(std::move(v), n, t);
}

ProfileVector left_profile(std::size_t n, double t) {
  require_positive_t(t);
  const double c = std::cbrt(static_cast<double>(n));
  const double p_real = std::floor(t * c);
  if (p_real > static_cast<double>(n)) throw std::invalid_argument("left_profile: support exceeds n, t too large for n");
  const auto p = static_cast<std::size_t>(p_real);
  std::vector<double> v(p);
  for (std::size_t k = 1; k <= p; ++k) v[k - 1] = left_shape(static_cast<double>(k) / c, t);
  return ProfileVector(std::move(v), n, t);
}

std::pair<std::size_t, std::size_t> sech_tau(std::size_t n, double t) {
  require_positive_t(t);
  const double rt = std::sqrt(t);
  const double scale = std::cbrt(static_cast<double>(n)) / rt;
  return {static_cast<std::size_t>(std::floor(sech(rt) * scale)),
          static_cast<std::size_t>(std::ceil((2.0 * rt + sech(rt)) * scale))};
}

double qform(const tridiag::SymTridiagonal& t, const ProfileVector& v) {
  if (t.size() != v.n()) throw std::invalid_argument("qform: dimension mismatch");
  const auto a = t.diag();
  const auto b = t.offdiag();
  double sum = 0.0;
  for (std::size_t k = 1; k <= v.support_p(); ++k) {
    const double vk = v.at(k);
    sum += a[k - 1] * vk * vk;
    if (k < t.size()) sum += 2.0 * b[k - 1] * vk * v.at(k + 1);
  }
  return sum;
}

GaussianStats qform_gaussian_stats(std::size_t n, double beta, std::size_t p, const ProfileVector& v) {
  if (!(beta > 0.0)) throw std::invalid_argument("qform_gaussian_stats: beta must be positive");
  if (v.n() != n) throw std::invalid_argument("qform_gaussian_stats: profile dimension differs from n");
  if (p > n) throw std::invalid_argument("qform_gaussian_stats: p exceeds n");
  if (v.support_p() > p) throw std::invalid_argument("qform_gaussian_stats: profile support escapes the modified block");
  double mu = 0.0, fourth = 0.0, diff = 0.0;
  for (std::size_t k = 1; k < p; ++k) mu += std::sqrt(static_cast<double>(n - k)) * v.at(k) * v.at(k + 1);
  for (std::size_t k = 1; k <= p; ++k) fourth += std::pow(v.at(k), 4);
  for (std::size_t k = 0; k <= p; ++k) {
    const double d = v.at(k + 1) * v.at(k + 1) - v.at(k) * v.at(k);
    diff += d * d;
  }
  return {2.0 * mu, (4.0 * fourth - diff) / beta};
}

RiemannCheck riemann_limits(const ProfileVector& v, RiemannSum which) {
  const double t = v.t();
  require_positive_t(t);
  const double rt = std::sqrt(t);
  const double c = std::cbrt(static_cast<double>(v.n()));
  double sum = 0.0;
  switch (which) {
    case RiemannSum::L2:
      for (double x : v.values()) sum += x * x;
      return {sum, 2.0 * c / rt};
    case RiemannSum::L4:
      for (double x : v.values()) sum += x * x * x * x;
      return {sum, (4.0 / 3.0) * c / rt};
    case RiemannSum::grad2: {
      const auto [tau1, tau2] = sech_tau(v.n(), t);
      for (std::size_t k = tau1 + 1; k + 2 <= tau2; ++k) {
        const double d = v.at(k + 1) - v.at(k);
        sum += d * d;
      }
      return {sum, (2.0 / 3.0) * rt / c};
    }
    case RiemannSum::k_weighted:
      for (std::size_t k = 1; k <= v.support_p(); ++k) sum += static_cast<double>(k) * v.at(k) * v.at(k);
      return {sum, 2.0 * c * c / rt};
  }
  throw std::invalid_argument("riemann_limits: unknown sum");
}

double grad2_full_sum(const ProfileVector& v) {
  double sum = 0.0;
  for (std::size_t k = 0; k <= v.support_p(); ++k) {
    const double d = v.at(k + 1) - v.at(k);
    sum += d * d;
  }
  return sum;
}

std::size_t riccati_steps(std::size_t n, double t) {
  require_positive_t(t);
  const double p = std::floor(t * std::cbrt(static_cast<double>(n)));
  if (p > static_cast<double>(n)) throw std::invalid_argument("riccati_walk: p exceeds n");
  return static_cast<std::size_t>(p);
}

namespace {

// Shared by both entry points. next_z() supplies Z_k for k = 1 .. p-1.
template <class NextZ>
WalkTrace walk(std::size_t n, double beta, double t, NextZ next_z) {
  if (!(beta > 0.0)) throw std::invalid_argument("riccati_walk: beta must be positive");
  const std::size_t p = riccati_steps(n, t);
  const double nd = static_cast<double>(n);
  const double c = std::cbrt(nd);         // n^{1/3}
  const double c2 = c * c;                // n^{2/3}
  const double noise = 2.0 / (std::sqrt(beta) * std::sqrt(c));  // 2 / (sqrt(beta) n^{1/6})
  WalkTrace trace{{}, n, beta, t, true};
  if (p == 0) return trace;
  trace.W.reserve(p);
  double w = 5.0;
  trace.W.push_back(w);
  for (std::size_t k = 1; k < p; ++k) {
    const double kd = static_cast<double>(k);
    const double z = next_z();
    const double damp = 1.0 + w / c;  // 1 + n^{-1/3} W
    if (!(damp > 0.0)) {
      // The walk has run below -n^{1/3}; the recursion is undefined from here on.
      trace.survived = false;
      return trace;
    }
    const double sigma = std::sqrt(0.5 + (1.0 - kd / nd) / (2.0 * damp * damp));
    w = w - t / c - w * w / (c + w) + kd / (c2 * damp) - noise * sigma * z;
    trace.W.push_back(w);
  }
  trace.survived = std::all_of(trace.W.begin(), trace.W.end(), [](double x) { return x > 1.0; });
  return trace;
}

}  // namespace

WalkTrace riccati_walk(std::size_t n, double beta, double t, rng::RngStream& s) {
  return walk(n, beta, t, [&s] { return s.normal(); });
}

WalkTrace riccati_walk_with_noise(std::size_t n, double beta, double t, std::span<const double> z) {
  std::size_t i = 0;
  return walk(n, beta, t, [&] {
    if (i >= z.size()) throw std::invalid_argument("riccati_walk_with_noise: not enough noise values");
    return z[i++];
  });
}

Proportion corridor_probability(double beta, double t, std::size_t n, std::size_t reps, std::uint64_t seed,
                                unsigned workers) {
  if (reps == 0) throw std::invalid_argument("corridor_probability: reps must be at least 1");
  riccati_steps(n, t);
  const auto counts = run_blocks<std::size_t>(reps, 64, workers, [&](std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    for (std::size_t r = begin; r < end; ++r) {
      rng::RngStream s(seed, r);
      if (riccati_walk(n, beta, t, s).survived) ++hits;
    }
    return hits;
  });
  std::size_t hits = 0;
  for (auto h : counts) hits += h;
  const auto ci = stats::wilson_interval(hits, reps);
  return {static_cast<double>(hits) / static_cast<double>(reps), ci.lo, ci.hi, hits, reps};
}

}  // namespace betatails::profiles
