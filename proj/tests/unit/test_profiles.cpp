#include "betatails/ensembles.hpp"
#include "betatails/profiles.hpp"
#include "betatails/tridiag.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace betatails::profiles;
using betatails::rng::RngStream;
using betatails::tridiag::SymTridiagonal;

namespace {

// Written out again here so the quadrature oracle does not go through the library shapes.
double ref_sech_shape(double x, double t) {
  const double rt = std::sqrt(t), s = 1.0 / std::cosh(rt);
  if (x <= 0.0) return 0.0;
  if (x < s) return x;
  if (x < 2.0 * rt + s) return 1.0 / std::cosh(x - rt - s);
  return x < 2.0 * rt + 2.0 * s ? 2.0 * rt + 2.0 * s - x : 0.0;
}

double ref_left_shape(double x, double t) {
  if (x <= 0.0 || x >= t) return 0.0;
  return std::min({x * std::sqrt(t), std::sqrt(t - x), t - x});
}

template <class F>
double integrate(F f, std::vector<double> cuts) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-14);
  }
  return total;
}

double sech_integral(double t, int power) {
  const double rt = std::sqrt(t), s = 1.0 / std::cosh(rt);
  return integrate([&](double x) { return std::pow(ref_sech_shape(x, t), power); },
                   {0.0, s, rt + s, 2.0 * rt + s, 2.0 * rt + 2.0 * s});
}

double left_integral(double t) {
  const double r = rho_t(t);
  return integrate([&](double x) { return std::pow(ref_left_shape(x, t), 2); }, {0.0, r, t - 1.0, t});
}

}  // namespace

TEST(RhoT, Examples) {
  EXPECT_NEAR(rho_t(1.0), (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(rho_t(100.0), 1.0, 0.01);
  EXPECT_THROW(rho_t(0.0), std::invalid_argument);
  EXPECT_THROW(rho_t(-1.0), std::invalid_argument);
  for (double t = 0.001; t < 1000.0; t *= 1.7) {
    const double r = rho_t(t);
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 1.0);
    EXPECT_NEAR(r * r * t + r - t, 0.0, 1e-12 * std::max(1.0, t));
  }
}

TEST(SechProfile, Shape) {
  const double t = 9.0, rt = 3.0, s = 1.0 / std::cosh(rt);
  EXPECT_DOUBLE_EQ(sech_shape(rt + s, t), 1.0);
  EXPECT_EQ(sech_shape(0.0, t), 0.0);
  EXPECT_EQ(sech_shape(2.0 * rt + 2.0 * s + 0.1, t), 0.0);
  for (double x = -1.0; x < 8.0; x += 0.013) EXPECT_NEAR(sech_shape(x, t), ref_sech_shape(x, t), 1e-15) << x;
}

TEST(SechProfile, SupportAndValues) {
  const std::size_t n = 1000;
  const double t = 4.0;
  const auto v = sech_profile(n, t);
  const double c = std::cbrt(1000.0) / 2.0;
  // v(p) sits at the end of the right ramp and is zero, so the stored support stops one short.
  const auto p = static_cast<std::size_t>(std::ceil((4.0 + 2.0 / std::cosh(2.0)) * c));
  EXPECT_EQ(v.at(p), 0.0);
  EXPECT_GT(v.at(p - 1), 0.0);
  EXPECT_EQ(v.at(0), 0.0);
  EXPECT_EQ(v.at(v.support_p() + 1), 0.0);
  for (std::size_t k = 1; k <= v.support_p(); ++k) {
    EXPECT_NEAR(v.at(k), ref_sech_shape(static_cast<double>(k) / c, t), 1e-15);
    EXPECT_GE(v.at(k), 0.0);
  }
  // Small t widens the support in k to about 2 n^{1/3} / sqrt(t).
  EXPECT_THROW(sech_profile(10, 0.01), std::invalid_argument);
}

TEST(SechProfile, L2AgainstQuadrature) {
  const std::size_t n = 1000000;
  const double t = 9.0;
  const auto v = sech_profile(n, t);
  double sum = 0.0;
  for (double x : v.values()) sum += x * x;
  const double h = std::sqrt(t) / std::cbrt(static_cast<double>(n));
  EXPECT_NEAR(sum * h, 2.0, 0.05 * 2.0);
  EXPECT_NEAR(sum * h, sech_integral(t, 2), 1e-3);
}

TEST(LeftProfile, Shape) {
  for (double t : {0.5, 2.0, 4.0, 16.0}) {
    EXPECT_EQ(left_shape(t, t), 0.0);
    for (double x = -0.5; x < t + 1.0; x += 0.011) EXPECT_NEAR(left_shape(x, t), ref_left_shape(x, t), 1e-15);
  }
  // At x = rho_t the first two branches cross; the (t - x) branch is above them once t - rho_t >= 1.
  for (double t : {2.0, 4.0, 16.0}) {
    const double r = rho_t(t);
    EXPECT_NEAR(r * std::sqrt(t), std::sqrt(t - r), 1e-12);
    EXPECT_NEAR(left_shape(r, t), r * std::sqrt(t), 1e-12);
  }
}

TEST(LeftProfile, SumMatchesQuadrature) {
  const std::size_t n = 1000000;
  const double c = std::cbrt(static_cast<double>(n));
  for (double t : {4.0, 16.0}) {
    const auto v = left_profile(n, t);
    EXPECT_EQ(v.support_p(), static_cast<std::size_t>(std::floor(t * c)) - 1);  // v(p) = g_t(t) = 0 is trimmed
    double sum = 0.0;
    for (double x : v.values()) sum += x * x;
    EXPECT_NEAR(sum / c, left_integral(t), 1e-3 * left_integral(t));
  }
  // The t^2 n^{1/3} / 2 leading term is accurate to 10% from t = 16 on. At t = 4 the square root
  // piece still carries a third of the mass; the quadrature ratio there is about 0.70.
  const auto v16 = left_profile(n, 16.0);
  double s16 = 0.0;
  for (double x : v16.values()) s16 += x * x;
  EXPECT_NEAR(s16 / (16.0 * 16.0 * c / 2.0), 1.0, 0.10);
  EXPECT_NEAR(left_integral(4.0) / 8.0, 0.70, 0.01);
}

TEST(Qform, Examples) {
  const auto v = sech_profile(200, 2.0);
  double norm2 = 0.0;
  for (double x : v.values()) norm2 += x * x;
  EXPECT_NEAR(qform(SymTridiagonal::identity(200), v), norm2, 1e-12);

  std::vector<double> d(5), e(4);
  for (std::size_t i = 0; i < 5; ++i) d[i] = 1.5 + static_cast<double>(i);
  for (std::size_t i = 0; i < 4; ++i) e[i] = 0.3 * static_cast<double>(i + 1);
  EXPECT_DOUBLE_EQ(qform(SymTridiagonal(d, e), ProfileVector({1.0}, 5)), 1.5);
  EXPECT_THROW(qform(SymTridiagonal(d, e), ProfileVector({1.0}, 6)), std::invalid_argument);

  // Dense v^T A v.
  const ProfileVector w({0.2, 0.7, 1.1, 0.4, 0.9}, 5);
  double dense = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    dense += d[i] * w.at(i + 1) * w.at(i + 1);
    if (i < 4) dense += 2.0 * e[i] * w.at(i + 1) * w.at(i + 2);
  }
  EXPECT_NEAR(qform(SymTridiagonal(d, e), w), dense, 1e-13);
}

TEST(Qform, RayleighBound) {
  const std::size_t n = 300;
  const auto spec = betatails::ensembles::EnsembleSpec::hermite(2.0, n, n / 2);
  const auto v = sech_profile(n, 4.0);
  double norm2 = 0.0;
  for (double x : v.values()) norm2 += x * x;
  for (std::uint64_t r = 0; r < 200; ++r) {
    RngStream s(3, r);
    const auto h = betatails::ensembles::sample_hermite_modified(spec, s);
    EXPECT_LE(qform(h, v) / norm2, betatails::tridiag::lambda_max(h, 1e-13) + 1e-12);
  }
}

TEST(QformStats, SingleEntry) {
  const auto g = qform_gaussian_stats(10, 2.0, 1, ProfileVector({1.0}, 10));
  EXPECT_EQ(g.mu, 0.0);
  EXPECT_DOUBLE_EQ(g.sigma2, 2.0 / 2.0);
  const auto g4 = qform_gaussian_stats(10, 4.0, 3, ProfileVector({1.0}, 10));
  EXPECT_DOUBLE_EQ(g4.sigma2, 2.0 / 4.0);
  EXPECT_THROW(qform_gaussian_stats(10, 2.0, 1, ProfileVector({1.0, 1.0}, 10)), std::invalid_argument);
}

TEST(QformStats, MonteCarlo) {
  const std::size_t n = 500;
  const double beta = 2.0;
  const auto v = sech_profile(n, 4.0);
  const std::size_t p = v.support_p() + 1;
  const auto g = qform_gaussian_stats(n, beta, p, v);
  const auto spec = betatails::ensembles::EnsembleSpec::hermite(beta, n, p);
  const std::size_t reps = 20000;
  std::vector<double> q(reps);
  for (std::uint64_t r = 0; r < reps; ++r) {
    RngStream s(17, r);
    q[r] = qform(betatails::ensembles::sample_hermite_modified(spec, s), v);
  }
  double mean = 0.0, var = 0.0, m3 = 0.0;
  for (double x : q) mean += x;
  mean /= reps;
  for (double x : q) {
    var += (x - mean) * (x - mean);
    m3 += std::pow(x - mean, 3);
  }
  var /= reps - 1.0;
  m3 /= reps;
  EXPECT_LT(std::abs(mean - g.mu), 4.0 * std::sqrt(var / reps));
  EXPECT_NEAR(var / g.sigma2, 1.0, 0.05);
  const double skew = m3 / std::pow(var, 1.5);
  EXPECT_LT(std::abs(skew), 4.0 * std::sqrt(6.0 / reps));
}

TEST(Riemann, Normalisers) {
  auto sech2 = [](double x) { return std::pow(1.0 / std::cosh(x), 2); };
  auto sech4 = [](double x) { return std::pow(1.0 / std::cosh(x), 4); };
  EXPECT_NEAR(integrate(sech2, {-40.0, 0.0, 40.0}), 2.0, 1e-12);
  EXPECT_NEAR(integrate(sech4, {-40.0, 0.0, 40.0}), 4.0 / 3.0, 1e-12);
}

TEST(Riemann, LimitsAtLargeN) {
  const auto v = sech_profile(100000000, 16.0);
  for (auto which : {RiemannSum::L2, RiemannSum::L4, RiemannSum::grad2, RiemannSum::k_weighted}) {
    const auto r = riemann_limits(v, which);
    EXPECT_GT(r.ratio(), 0.95) << static_cast<int>(which);
    EXPECT_LT(r.ratio(), 1.05) << static_cast<int>(which);
  }
  // The ramps add a visible amount to the full gradient sum.
  EXPECT_GT(grad2_full_sum(v), riemann_limits(v, RiemannSum::grad2).value);
}

// At fixed t the sums converge to integrals of the truncated profile, which differ from the
// whole-line predictions by O(exp(-2 sqrt t)). Discretisation error against those integrals must
// shrink as n grows. Small t keeps the ramp kinks visible; at t = 16 the sums are already accurate
// to rounding noise at n = 1000.
TEST(Riemann, ErrorShrinksWithResolution) {
  const double t = 2.0, rt = std::sqrt(2.0), s = 1.0 / std::cosh(rt);
  const double i2 = sech_integral(t, 2), i4 = sech_integral(t, 4);
  const double ik = integrate([&](double x) { return x * std::pow(ref_sech_shape(x, t), 2); },
                              {0.0, s, rt + s, 2.0 * rt + s, 2.0 * rt + 2.0 * s});
  const double ig = integrate([](double y) { return std::pow(std::tanh(y) / std::cosh(y), 2); }, {-rt, 0.0, rt});
  double prev[4] = {INFINITY, INFINITY, INFINITY, INFINITY};
  for (std::size_t n : {1000u, 1000000u, 1000000000u}) {
    const auto v = sech_profile(n, t);
    const double h = rt / std::cbrt(static_cast<double>(n));
    const double err[4] = {
        std::abs(riemann_limits(v, RiemannSum::L2).value * h / i2 - 1.0),
        std::abs(riemann_limits(v, RiemannSum::L4).value * h / i4 - 1.0),
        std::abs(riemann_limits(v, RiemannSum::grad2).value / h / ig - 1.0),
        std::abs(riemann_limits(v, RiemannSum::k_weighted).value * h * h / ik - 1.0),
    };
    for (int w = 0; w < 4; ++w) {
      EXPECT_LT(err[w], prev[w]) << "sum " << w << " n = " << n;
      prev[w] = err[w];
    }
  }
  // grad2 runs over whole index ranges, so its error is O(h) with h = 1.4e-3 at the finest grid.
  for (double e : prev) EXPECT_LT(e, 2e-3);
}

TEST(Riccati, StartsAtFive) {
  RngStream s(1, 0);
  const auto w = riccati_walk(8000, 2.0, 1.5, s);
  ASSERT_FALSE(w.W.empty());
  EXPECT_EQ(w.W.front(), 5.0);
  EXPECT_EQ(w.W.size(), riccati_steps(8000, 1.5));
  EXPECT_EQ(riccati_steps(8000, 1.5), 30u);
}

TEST(Riccati, ZeroNoiseMatchesScalarIteration) {
  const std::size_t n = 8000;
  const double t = 0.7, beta = 3.0;
  const std::size_t p = riccati_steps(n, t);
  const std::vector<double> z(p, 0.0);
  const auto trace = riccati_walk_with_noise(n, beta, t, z);
  ASSERT_EQ(trace.W.size(), p);
  const double c = std::pow(8000.0, 1.0 / 3.0);
  double w = 5.0;
  for (std::size_t k = 1; k <= p; ++k) {
    EXPECT_NEAR(trace.W[k - 1], w, 1e-12) << k;
    w = w - t / c - w * w / (c + w) + k / (c * c * (1.0 + w / c));
  }
}

TEST(Riccati, NoiseEntersWithTheRightScale) {
  const std::size_t n = 1000;
  const double t = 0.5, beta = 2.0;
  std::vector<double> z(riccati_steps(n, t), 0.0);
  const auto base = riccati_walk_with_noise(n, beta, t, z);
  z[0] = 1.0;
  const auto bumped = riccati_walk_with_noise(n, beta, t, z);
  const double c = 10.0, sigma = std::sqrt(0.5 + (1.0 - 1.0 / 1000.0) / (2.0 * std::pow(1.0 + 5.0 / c, 2)));
  EXPECT_NEAR(base.W[1] - bumped.W[1], 2.0 / (std::sqrt(beta) * std::pow(1000.0, 1.0 / 6.0)) * sigma, 1e-12);
}

TEST(Riccati, SurvivedMatchesDefinition) {
  for (std::uint64_t r = 0; r < 500; ++r) {
    RngStream s(2, r);
    const auto w = riccati_walk(8000, 2.0, 2.0, s);
    bool all = w.W.size() == riccati_steps(8000, 2.0);
    for (double x : w.W) all = all && x > 1.0;
    ASSERT_EQ(w.survived, all);
  }
}

TEST(Corridor, Examples) {
  EXPECT_THROW(corridor_probability(2.0, 1.0, 8000, 0, 1), std::invalid_argument);
  const auto tiny = corridor_probability(2.0, 0.01, 8000, 1000, 1);
  EXPECT_EQ(tiny.estimate, 1.0);
  EXPECT_LE(tiny.lo, 1.0);
}

TEST(Corridor, DecreasingInT) {
  const auto a = corridor_probability(2.0, 1.0, 8000, 20000, 5);
  const auto b = corridor_probability(2.0, 1.5, 8000, 20000, 5);
  const auto c = corridor_probability(2.0, 2.0, 8000, 20000, 5);
  EXPECT_GT(a.estimate, b.estimate);
  EXPECT_GT(b.estimate, c.estimate);
  EXPECT_GT(a.lo, c.hi);
  EXPECT_LE(a.lo, a.estimate);
  EXPECT_GE(a.hi, a.estimate);
}

TEST(Corridor, WorkerCountDoesNotChangeResult) {
  const auto one = corridor_probability(2.0, 1.5, 8000, 3000, 9, 1);
  const auto four = corridor_probability(2.0, 1.5, 8000, 3000, 9, 4);
  EXPECT_EQ(one.successes, four.successes);
}
