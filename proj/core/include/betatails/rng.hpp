#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace betatails::rng {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/// Philox4x32-10 block function (Salmon, Moraes, Dror, Shaw 2011).
Philox4x32Counter philox4x32(Philox4x32Counter ctr, Philox4x32Key key);

/// Counter-based random stream keyed by (master_seed, stream_id).
///
/// The key is the master seed, the upper half of the counter is the stream id and the
/// lower half is a block index, so two streams never share a Philox block.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform();
  /// Standard normal (Marsaglia polar method, the spare value is kept).
  double normal();

  std::uint64_t master_seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_id);

/// Degrees of freedom for the chi family. Real valued, strictly positive.
class Dof {
 public:
  explicit Dof(double value);
  double value() const { return value_; }

 private:
  double value_;
};

double sample_gaussian(RngStream& s, double mean, double sd);
/// Gamma(shape, scale) via Marsaglia-Tsang.
double sample_gamma(RngStream& s, double shape, double scale);
double sample_chi_square(RngStream& s, Dof k);
double sample_chi(RngStream& s, Dof k);
double sample_exponential(RngStream& s);

/// Standard normal CDF and its complement.
double normal_cdf(double z);
double normal_ccdf(double z);

/// F^{-1}_{chi_k}(u) for u in (0, 1).
double chi_quantile(double u, Dof k);
/// F^{-1}_{chi_k}(1 - q), accurate when q is tiny.
double chi_upper_quantile(double q, Dof k);
/// Quantile of chi_k at the normal probability Phi(z), without forming Phi(z) near 1.
double chi_quantile_at_normal(double z, Dof k);

std::pair<double, double> chi_quantile_couple(double u, Dof k1, Dof k2);

}  // namespace betatails::rng
