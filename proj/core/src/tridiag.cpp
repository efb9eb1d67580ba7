#include "betatails/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betatails::tridiag {

namespace {

constexpr double kPivotGuard = 1e-300;
constexpr double kRescaleAbove = 1e150;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void require_positive_offdiag(const SymTridiagonal& t) {
  for (double b : t.offdiag()) {
    if (!(b > 0.0)) throw std::invalid_argument("eigvec_recursion: off-diagonal entries must be strictly positive");
  }
}

}  // namespace

SymTridiagonal::SymTridiagonal(std::vector<double> diag, std::vector<double> offdiag)
    : diag_(std::move(diag)), offdiag_(std::move(offdiag)) {
  if (diag_.empty()) throw std::invalid_argument("SymTridiagonal: empty matrix");
  if (offdiag_.size() + 1 != diag_.size()) throw std::invalid_argument("SymTridiagonal: offdiag must have n - 1 entries");
  if (!all_finite(diag_) || !all_finite(offdiag_)) throw std::invalid_argument("SymTridiagonal: entries must be finite");
}

SymTridiagonal SymTridiagonal::identity(std::size_t n) {
  return SymTridiagonal(std::vector<double>(n, 1.0), std::vector<double>(n == 0 ? 0 : n - 1, 0.0));
}

LowerBidiagonal::LowerBidiagonal(std::vector<double> diag, std::vector<double> subdiag)
    : diag_(std::move(diag)), subdiag_(std::move(subdiag)) {
  if (diag_.empty()) throw std::invalid_argument("LowerBidiagonal: empty matrix");
  if (subdiag_.size() + 1 != diag_.size()) throw std::invalid_argument("LowerBidiagonal: subdiag must have n - 1 entries");
  if (!all_finite(diag_) || !all_finite(subdiag_)) throw std::invalid_argument("LowerBidiagonal: entries must be finite");
}

Interval gershgorin_bounds(const SymTridiagonal& t) {
  const auto a = t.diag();
  const auto b = t.offdiag();
  const std::size_t n = a.size();
  double lo = a[0], hi = a[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(b[i - 1]) : 0.0) + (i + 1 < n ? std::abs(b[i]) : 0.0);
    lo = std::min(lo, a[i] - r);
    hi = std::max(hi, a[i] + r);
  }
  return {lo, hi};
}

std::size_t sturm_count(const SymTridiagonal& t, double lambda) {
  const auto a = t.diag();
  const auto b = t.offdiag();
  std::size_t count = 0;
  double q = a[0] - lambda;
  for (std::size_t i = 0;; ++i) {
    if (std::abs(q) < kPivotGuard) q = std::signbit(q) ? -kPivotGuard : kPivotGuard;
    if (q < 0.0) ++count;
    if (i + 1 == a.size()) break;
    q = (a[i + 1] - lambda) - b[i] * b[i] / q;
  }
  return count;
}

double default_tolerance(const SymTridiagonal& t) {
  const auto [lo, hi] = gershgorin_bounds(t);
  const double width = hi - lo;
  if (width > 0.0) return 1e-10 * width;
  return 1e-10 * std::max(1.0, std::abs(lo));
}

double lambda_max(const SymTridiagonal& t, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("lambda_max: tol must be positive");
  auto [lo, hi] = gershgorin_bounds(t);
  const std::size_t n = t.size();
  // Invariant: fewer than n eigenvalues below lo, all n below-or-at hi.
  while (hi - lo >= tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) == n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lambda_max(const SymTridiagonal& t) { return lambda_max(t, default_tolerance(t)); }

RecursionTrace eigvec_recursion(const SymTridiagonal& t, double lambda) {
  require_positive_offdiag(t);
  const auto a = t.diag();
  const auto b = t.offdiag();
  const std::size_t n = a.size();
  RecursionTrace trace{lambda, std::vector<double>(n + 1), std::nullopt};
  auto& u = trace.u;
  u[0] = 1.0;
  double prev = 0.0;  // u_{i-1}
  double scale_max = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = (i + 1 < n) ? b[i] : 1.0;
    const double b_prev = (i > 0) ? b[i - 1] : 0.0;
    u[i + 1] = ((lambda - a[i]) * u[i] - b_prev * prev) / c;
    // Signs are read before any rescaling, which may flush early entries to zero.
    if (u[i + 1] <= 0.0 && !trace.first_nonpositive_index) trace.first_nonpositive_index = i + 2;
    prev = u[i];
    scale_max = std::max(scale_max, std::abs(u[i + 1]));
    if (scale_max > kRescaleAbove) {
      const double inv = 1.0 / scale_max;
      for (std::size_t k = 0; k <= i + 1; ++k) u[k] *= inv;
      prev *= inv;
      scale_max = 1.0;
    }
  }
  return trace;
}

bool positivity_criterion(const SymTridiagonal& t, double lambda) {
  return !eigvec_recursion(t, lambda).first_nonpositive_index.has_value();
}

SymTridiagonal bidiag_gram(const LowerBidiagonal& b) {
  const auto d = b.diag();
  const auto c = b.subdiag();
  const std::size_t n = d.size();
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double ck = (k + 1 < n) ? c[k] : 0.0;
    diag[k] = d[k] * d[k] + ck * ck;
    if (k + 1 < n) off[k] = c[k] * d[k + 1];
  }
  return SymTridiagonal(std::move(diag), std::move(off));
}

double entrywise_gap(const SymTridiagonal& x, const SymTridiagonal& y) {
  if (x.size() != y.size()) throw std::invalid_argument("entrywise_gap: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x.diag()[i] - y.diag()[i]));
  for (std::size_t i = 0; i + 1 < x.size(); ++i) m = std::max(m, std::abs(x.offdiag()[i] - y.offdiag()[i]));
  return 3.0 * m;
}

}  // namespace betatails::tridiag
