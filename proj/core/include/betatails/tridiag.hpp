#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace betatails::tridiag {

/// Real symmetric tridiagonal matrix stored as its diagonal (n) and off-diagonal (n - 1).
class SymTridiagonal {
 public:
  SymTridiagonal(std::vector<double> diag, std::vector<double> offdiag);

  std::size_t size() const { return diag_.size(); }
  std::span<const double> diag() const { return diag_; }
  std::span<const double> offdiag() const { return offdiag_; }

  static SymTridiagonal identity(std::size_t n);

 private:
  std::vector<double> diag_;
  std::vector<double> offdiag_;
};

/// Lower bidiagonal B with B(k,k) = diag[k] and B(k+1,k) = subdiag[k].
class LowerBidiagonal {
 public:
  LowerBidiagonal(std::vector<double> diag, std::vector<double> subdiag);

  std::size_t size() const { return diag_.size(); }
  std::span<const double> diag() const { return diag_; }
  std::span<const double> subdiag() const { return subdiag_; }

 private:
  std::vector<double> diag_;
  std::vector<double> subdiag_;
};

struct Interval {
  double lo;
  double hi;
};

/// u holds u_1 ... u_{n+1}; u[0] is u_1 = 1. Indices reported 1-based as in the recursion.
struct RecursionTrace {
  double lambda;
  std::vector<double> u;
  std::optional<std::size_t> first_nonpositive_index;
};

Interval gershgorin_bounds(const SymTridiagonal& t);

/// Number of eigenvalues strictly below lambda (inertia of the LDL^T factorization of T - lambda I).
std::size_t sturm_count(const SymTridiagonal& t, double lambda);

/// 1e-10 times the Gershgorin width, or a small absolute value for a degenerate interval.
double default_tolerance(const SymTridiagonal& t);

/// Largest eigenvalue by Sturm bisection; the result is within tol of the true value.
double lambda_max(const SymTridiagonal& t, double tol);
double lambda_max(const SymTridiagonal& t);

/// c_i u_{i+1} = (lambda - a_i) u_i - b_{i-1} u_{i-1}, u_0 = 0, u_1 = 1, c_n = 1.
RecursionTrace eigvec_recursion(const SymTridiagonal& t, double lambda);

/// True iff every u_i of the recursion is positive, which happens iff lambda > lambda_max.
bool positivity_criterion(const SymTridiagonal& t, double lambda);

/// B^T B as a symmetric tridiagonal matrix.
SymTridiagonal bidiag_gram(const LowerBidiagonal& b);

/// 3 * max |entry difference|, an upper bound on |lambda_max(a) - lambda_max(b)|.
double entrywise_gap(const SymTridiagonal& a, const SymTridiagonal& b);

}  // namespace betatails::tridiag
