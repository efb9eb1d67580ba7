#pragma once

#include "betatails/rng.hpp"
#include "betatails/tridiag.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace betatails::profiles {

/// Nonnegative test vector on 1..n. Only v(1)..v(support_p) are stored, everything beyond is zero,
/// so profiles for very large n stay small.
class ProfileVector {
 public:
  ProfileVector(std::vector<double> values, std::size_t n, double t = 0.0);

  /// v(k) for any k >= 0; v(0) = 0 and v(k) = 0 past the support.
  double at(std::size_t k) const { return (k == 0 || k > values_.size()) ? 0.0 : values_[k - 1]; }
  std::span<const double> values() const { return values_; }
  std::size_t support_p() const { return values_.size(); }
  std::size_t n() const { return n_; }
  double t() const { return t_; }

 private:
  std::vector<double> values_;
  std::size_t n_;
  double t_;
};

struct GaussianStats {
  double mu;
  double sigma2;
};

enum class RiemannSum { L2, L4, grad2, k_weighted };

struct RiemannCheck {
  double value;
  double predicted;
  double ratio() const { return value / predicted; }
};

struct WalkTrace {
  std::vector<double> W;  // W[0] is W(1)
  std::size_t n;
  double beta;
  double t;
  bool survived;
};

struct Proportion {
  double estimate;
  double lo;
  double hi;
  std::size_t successes;
  std::size_t reps;
};

double rho_t(double t);

/// Piecewise profile f_t: slope-1 ramps around a sech bump centred at sqrt(t) + sech(sqrt(t)).
double sech_shape(double x, double t);
/// g_t(x) = min(x sqrt(t), sqrt((t - x)^+), (t - x)^+).
double left_shape(double x, double t);

ProfileVector sech_profile(std::size_t n, double t);
ProfileVector left_profile(std::size_t n, double t);

/// Boundary indices floor(sech(sqrt t) n^{1/3} / sqrt t) and ceil((2 sqrt t + sech(sqrt t)) n^{1/3} / sqrt t).
std::pair<std::size_t, std::size_t> sech_tau(std::size_t n, double t);

double qform(const tridiag::SymTridiagonal& t, const ProfileVector& v);
GaussianStats qform_gaussian_stats(std::size_t n, double beta, std::size_t p, const ProfileVector& v);

/// Grid sums of a sech profile against their Riemann limits. grad2 is summed over the bump,
/// k = tau1 + 1 .. tau2 - 2; grad2_full_sum gives the sum including both ramps.
RiemannCheck riemann_limits(const ProfileVector& v, RiemannSum which);
double grad2_full_sum(const ProfileVector& v);

WalkTrace riccati_walk(std::size_t n, double beta, double t, rng::RngStream& s);
/// Same recursion with caller supplied noise Z_1 .. Z_{p-1}.
WalkTrace riccati_walk_with_noise(std::size_t n, double beta, double t, std::span<const double> z);
std::size_t riccati_steps(std::size_t n, double t);

/// Survival fraction of the walk, replicate r using stream (seed, r).
Proportion corridor_probability(double beta, double t, std::size_t n, std::size_t reps, std::uint64_t seed,
                                unsigned workers = 1);

}  // namespace betatails::profiles
