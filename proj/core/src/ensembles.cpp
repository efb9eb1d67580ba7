#include "betatails/ensembles.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace betatails::ensembles {

using rng::Dof;
using tridiag::LowerBidiagonal;
using tridiag::SymTridiagonal;

EnsembleSpec EnsembleSpec::hermite(double beta, std::size_t n, std::size_t p) {
  EnsembleSpec s{beta, n, Kind::hermite, 0.0, p};
  s.validate();
  return s;
}

EnsembleSpec EnsembleSpec::laguerre(double beta, std::size_t n, double m, std::size_t p) {
  EnsembleSpec s{beta, n, Kind::laguerre, m, p};
  s.validate();
  return s;
}

void EnsembleSpec::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("ensemble: beta must be positive");
  if (n == 0) throw std::invalid_argument("ensemble: n must be positive");
  if (p > n) throw std::invalid_argument("ensemble: modification depth p exceeds n");
  if (kind == Kind::laguerre && !(m > static_cast<double>(n) - 1.0)) {
    throw std::invalid_argument("ensemble: Laguerre requires m > n - 1");
  }
}

namespace {

void require(const EnsembleSpec& spec, Kind kind) {
  spec.validate();
  if (spec.kind != kind) throw std::invalid_argument("ensemble: sampler does not match spec kind");
}

// Diagonal draws come first, then off-diagonal ones, so the draw order is fixed.
SymTridiagonal hermite_impl(const EnsembleSpec& spec, rng::RngStream& s, std::size_t p) {
  const std::size_t n = spec.n;
  const double inv = 1.0 / std::sqrt(spec.beta);
  std::vector<double> diag(n), off(n - 1);
  for (auto& x : diag) x = rng::sample_gaussian(s, 0.0, std::sqrt(2.0)) * inv;
  for (std::size_t i = 1; i < n; ++i) {
    const double dof = spec.beta * static_cast<double>(n - i);
    if (i <= p) {
      off[i - 1] = (std::sqrt(dof) + s.normal() / std::sqrt(2.0)) * inv;
    } else {
      off[i - 1] = rng::sample_chi(s, Dof(dof)) * inv;
    }
  }
  return SymTridiagonal(std::move(diag), std::move(off));
}

LowerBidiagonal laguerre_impl(const EnsembleSpec& spec, rng::RngStream& s, std::size_t p) {
  const std::size_t n = spec.n;
  const double inv = 1.0 / std::sqrt(spec.beta);
  std::vector<double> d(n), c(n - 1);
  for (std::size_t i = 1; i <= n; ++i) {
    const double dof = spec.beta * (spec.m + 1.0 - static_cast<double>(i));
    if (i <= p) {
      d[i - 1] = (std::sqrt(dof) + s.normal() / std::sqrt(2.0)) * inv;
    } else {
      d[i - 1] = rng::sample_chi(s, Dof(dof)) * inv;
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double dof = spec.beta * static_cast<double>(n - i);
    if (i <= p) {
      c[i - 1] = (std::sqrt(dof) + s.normal() / std::sqrt(2.0)) * inv;
    } else {
      c[i - 1] = rng::sample_chi(s, Dof(dof)) * inv;
    }
  }
  return LowerBidiagonal(std::move(d), std::move(c));
}

}  // namespace

SymTridiagonal sample_hermite(const EnsembleSpec& spec, rng::RngStream& s) {
  require(spec, Kind::hermite);
  if (spec.p != 0) throw std::invalid_argument("sample_hermite: spec has p > 0, use sample_hermite_modified");
  return hermite_impl(spec, s, 0);
}

LowerBidiagonal sample_laguerre(const EnsembleSpec& spec, rng::RngStream& s) {
  require(spec, Kind::laguerre);
  if (spec.p != 0) throw std::invalid_argument("sample_laguerre: spec has p > 0, use sample_laguerre_modified");
  return laguerre_impl(spec, s, 0);
}

SymTridiagonal sample_hermite_modified(const EnsembleSpec& spec, rng::RngStream& s) {
  require(spec, Kind::hermite);
  return hermite_impl(spec, s, spec.p);
}

LowerBidiagonal sample_laguerre_modified(const EnsembleSpec& spec, rng::RngStream& s) {
  require(spec, Kind::laguerre);
  return laguerre_impl(spec, s, spec.p);
}

MatrixPair coupled_original_modified(const EnsembleSpec& spec, rng::RngStream& s) {
  require(spec, Kind::hermite);
  const std::size_t n = spec.n;
  const double inv = 1.0 / std::sqrt(spec.beta);
  std::vector<double> diag(n), off(n - 1), off_hat(n - 1);
  for (auto& x : diag) x = rng::sample_gaussian(s, 0.0, std::sqrt(2.0)) * inv;
  for (std::size_t i = 1; i < n; ++i) {
    const double dof = spec.beta * static_cast<double>(n - i);
    if (i <= spec.p) {
      const double zeta = s.normal();
      off[i - 1] = rng::chi_quantile_at_normal(zeta, Dof(dof)) * inv;
      off_hat[i - 1] = (std::sqrt(dof) + zeta / std::sqrt(2.0)) * inv;
    } else {
      off[i - 1] = off_hat[i - 1] = rng::sample_chi(s, Dof(dof)) * inv;
    }
  }
  std::vector<double> diag_copy = diag;
  return {SymTridiagonal(std::move(diag), std::move(off)), SymTridiagonal(std::move(diag_copy), std::move(off_hat))};
}

double hermite_scale(double raw, std::size_t n) {
  const double nn = static_cast<double>(n);
  return (raw / std::sqrt(nn) - 2.0) * std::pow(nn, 2.0 / 3.0);
}

double hermite_unscale(double scaled, std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::sqrt(nn) * (2.0 + scaled * std::pow(nn, -2.0 / 3.0));
}

namespace {

struct LaguerreMap {
  double centre;  // (sqrt m + sqrt n)^2
  double factor;  // (sqrt(mn))^{1/3} (sqrt m + sqrt n)^{2/3}
};

LaguerreMap laguerre_map(std::size_t n, double m) {
  const double nn = static_cast<double>(n);
  const double s = std::sqrt(m) + std::sqrt(nn);
  return {s * s, std::cbrt(std::sqrt(m * nn)) * std::cbrt(s * s)};
}

}  // namespace

double laguerre_scale(double raw, std::size_t n, double m) {
  const auto map = laguerre_map(n, m);
  return map.factor * (raw / map.centre - 1.0);
}

double laguerre_unscale(double scaled, std::size_t n, double m) {
  const auto map = laguerre_map(n, m);
  return map.centre * (1.0 + scaled / map.factor);
}

ScaledStatistic hermite_scaled_max(const EnsembleSpec& spec, rng::RngStream& s, double tol) {
  const auto t = sample_hermite_modified(spec, s);
  const double raw = tridiag::lambda_max(t, tol);
  return {raw, hermite_scale(raw, spec.n), spec};
}

ScaledStatistic laguerre_scaled_max(const EnsembleSpec& spec, rng::RngStream& s, double tol) {
  const auto b = sample_laguerre_modified(spec, s);
  const double raw = tridiag::lambda_max(tridiag::bidiag_gram(b), tol);
  return {raw, laguerre_scale(raw, spec.n, spec.m), spec};
}

ScalingConstants scaling_constants(double gamma) {
  if (!(gamma >= 1.0)) throw std::invalid_argument("scaling_constants: gamma must be at least 1");
  const double r = 1.0 + std::sqrt(gamma);
  return {r * r, std::pow(gamma, -1.0 / 6.0) * std::pow(r, 4.0 / 3.0)};
}

std::size_t domination_size(double beta, std::size_t n) {
  const double half = beta * static_cast<double>(n) / 2.0;
  const double nearest = std::round(half);
  if (std::abs(half - nearest) <= 1e-9 * std::max(1.0, half)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(half));
}

MatrixPair domination_pair(double beta, std::size_t n, rng::RngStream& s) {
  if (!(beta >= 2.0) || !std::isfinite(beta)) throw std::invalid_argument("domination_pair: beta must be at least 2");
  if (n == 0) throw std::invalid_argument("domination_pair: n must be positive");
  const std::size_t big_n = domination_size(beta, n);
  // sqrt(2) H_{N,2} has diagonal N(0,2) and off-diagonal chi_{2(N-i)}; sqrt(beta) H_{n,beta} has
  // diagonal N(0,2) and off-diagonal chi_{beta(n-i)}. Share the diagonal and one uniform per off-diagonal.
  std::vector<double> big_diag(big_n), big_off(big_n - 1), small_diag(n), small_off(n - 1);
  for (std::size_t i = 0; i < big_n; ++i) big_diag[i] = rng::sample_gaussian(s, 0.0, std::sqrt(2.0));
  for (std::size_t i = 0; i < n; ++i) small_diag[i] = big_diag[i];
  for (std::size_t i = 1; i < big_n; ++i) {
    const Dof big_dof(2.0 * static_cast<double>(big_n - i));
    if (i < n) {
      const double u = s.uniform();
      const auto [lo, hi] = rng::chi_quantile_couple(u, Dof(beta * static_cast<double>(n - i)), big_dof);
      small_off[i - 1] = lo;
      big_off[i - 1] = hi;
    } else {
      big_off[i - 1] = rng::sample_chi(s, big_dof);
    }
  }
  return {SymTridiagonal(std::move(big_diag), std::move(big_off)),
          SymTridiagonal(std::move(small_diag), std::move(small_off))};
}

}  // namespace betatails::ensembles
