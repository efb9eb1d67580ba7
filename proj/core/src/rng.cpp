#include "betatails/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace betatails::rng {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32Counter philox4x32(Philox4x32Counter c, Philox4x32Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : seed_(master_seed), stream_(stream_id) {}

void RngStream::refill() {
  const Philox4x32Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const Philox4x32Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  const auto out = philox4x32(ctr, key);
  buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  available_ = 2;
  ++block_;
}

std::uint64_t RngStream::next_u64() {
  if (available_ == 0) refill();
  return buffer_[2 - available_--];
}

double RngStream::uniform() { return to_open_unit(next_u64()); }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double x, y, r2;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    r2 = x * x + y * y;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = y * f;
  has_spare_ = true;
  return x * f;
}

RngStream make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RngStream(master_seed, stream_id);
}

Dof::Dof(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("degrees of freedom must be positive and finite");
  }
}

double sample_gaussian(RngStream& s, double mean, double sd) {
  if (!(sd >= 0.0)) throw std::invalid_argument("sample_gaussian: sd must be nonnegative");
  if (sd == 0.0) return mean;
  return mean + sd * s.normal();
}

double sample_gamma(RngStream& s, double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("sample_gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1 and correct with U^{1/shape}.
    const double g = sample_gamma(s, shape + 1.0, 1.0);
    return scale * g * std::pow(s.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = s.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = s.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

double sample_chi_square(RngStream& s, Dof k) { return sample_gamma(s, 0.5 * k.value(), 2.0); }

double sample_chi(RngStream& s, Dof k) { return std::sqrt(sample_chi_square(s, k)); }

double sample_exponential(RngStream& s) { return -std::log1p(-s.uniform()); }

double normal_cdf(double z) { return 0.5 * boost::math::erfc(-z / std::sqrt(2.0)); }

double normal_ccdf(double z) { return 0.5 * boost::math::erfc(z / std::sqrt(2.0)); }

double chi_quantile(double u, Dof k) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("chi_quantile: u must lie in (0, 1)");
  return std::sqrt(2.0 * boost::math::gamma_p_inv(0.5 * k.value(), u));
}

double chi_upper_quantile(double q, Dof k) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("chi_upper_quantile: q must lie in (0, 1)");
  return std::sqrt(2.0 * boost::math::gamma_q_inv(0.5 * k.value(), q));
}

double chi_quantile_at_normal(double z, Dof k) {
  // Use whichever tail probability is below one half so that neither rounds to 1.
  if (z <= 0.0) return chi_quantile(normal_cdf(z), k);
  return chi_upper_quantile(normal_ccdf(z), k);
}

std::pair<double, double> chi_quantile_couple(double u, Dof k1, Dof k2) {
  return {chi_quantile(u, k1), chi_quantile(u, k2)};
}

}  // namespace betatails::rng
