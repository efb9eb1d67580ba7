#pragma once

#include "betatails/ensembles.hpp"
#include "betatails/lpp.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace betatails::stats {

// ---------------------------------------------------------------- intervals and fits

struct WilsonInterval {
  double lo;
  double hi;
};

/// 95% Wilson score interval (z = 1.959964).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

enum class Side { right, left };

struct TailPoint {
  double t;
  double p_hat;
  double wilson_lo;
  double wilson_hi;
  std::uint64_t reps;
  std::uint64_t successes;
};

struct TailCurve {
  std::vector<TailPoint> points;
  Side side = Side::right;
  double target_power = 1.5;
};

struct FitResult {
  double coefficient;
  double power;
  double r_squared;
  std::size_t points_used;
  double intercept = 0.0;  // nonzero only in intercept mode
};

enum class FitMode { through_origin, with_intercept };

/// Least squares of -log p_hat on t^power over points with 10/reps < p_hat < 0.5.
/// Through the origin, r_squared is the uncentred coefficient of determination.
FitResult fit_exponent(const TailCurve& curve, FitMode mode = FitMode::through_origin);
bool usable_for_fit(const TailPoint& p);

// ---------------------------------------------------------------- Monte Carlo tails

/// One replicate of a tail experiment, able to answer threshold questions about itself.
class TailReplicate {
 public:
  virtual ~TailReplicate() = default;
  /// Right side: scaled statistic >= t. Left side: scaled statistic <= -t.
  virtual bool hit(Side side, double t) const = 0;
};

class TailSampler {
 public:
  virtual ~TailSampler() = default;
  /// Replicate number rep of the experiment seeded by master_seed.
  virtual std::unique_ptr<TailReplicate> draw(std::uint64_t master_seed, std::uint64_t rep) const = 0;
  virtual double target_power(Side side) const { return side == Side::right ? 1.5 : 3.0; }
};

/// Hermite or Laguerre ensemble; events decided by Sturm counts at the unscaled thresholds.
std::unique_ptr<TailSampler> matrix_tail_sampler(const ensembles::EnsembleSpec& spec);

enum class LppKind { p2p, p2l, l2p, hs };
LppKind parse_lpp_kind(const std::string& name);
std::string to_string(LppKind k);

/// Passage time T^*_n of one fresh field per replicate, scaled as (T - 4n) / (2^{4/3} n^{1/3}).
std::unique_ptr<TailSampler> lpp_tail_sampler(LppKind kind, std::int64_t n, lpp::Convention c);

/// Field seed used for replicate rep of an LPP experiment.
std::uint64_t replicate_field_seed(std::uint64_t master_seed, std::uint64_t rep);

/// T^*_n for a single field.
double lpp_passage(LppKind kind, const lpp::WeightField& f, std::int64_t n, lpp::Convention c);

struct TailQuery {
  Side side;
  std::vector<double> t_grid;
};

std::vector<TailCurve> mc_tails(const TailSampler& sampler, const std::vector<TailQuery>& queries, std::uint64_t reps,
                                std::uint64_t master_seed, unsigned workers = 1);
TailCurve mc_tail(const TailSampler& sampler, Side side, std::span<const double> t_grid, std::uint64_t reps,
                  std::uint64_t master_seed, unsigned workers = 1);
/// Per-replicate indicators of one event, in replicate order.
std::vector<std::uint8_t> mc_indicators(const TailSampler& sampler, Side side, double t, std::uint64_t reps,
                                        std::uint64_t master_seed);

// ---------------------------------------------------------------- distribution tests

struct KsResult {
  double statistic;
  double p_value;
};

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);
/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

// ---------------------------------------------------------------- rate function

/// J(4 + eps) for the Marchenko-Pastur law, adaptive Gauss-Kronrod on the theta substitution.
double laguerre_rate_function(double eps, int quad_points = 16);

// ---------------------------------------------------------------- LPP geometry

struct LilEntry {
  std::int64_t n;
  double T;
  double norm_plus;
  double norm_minus;
  double run_max_plus;
  double run_min_minus;
};

struct LilTrajectory {
  std::vector<LilEntry> entries;
  double running_max_plus;
  double running_min_minus;
  int beta_tag;
};

std::vector<std::int64_t> schedule_geometric(double rho, std::int64_t n_min, std::int64_t n_max);
std::vector<std::int64_t> schedule_stretched_exponential(double eps, std::int64_t n_min, std::int64_t n_max);
std::vector<std::int64_t> schedule_factorial_power(double eps, std::int64_t n_min, std::int64_t n_max);
/// "geometric:rho:min:max", "stretched:eps:min:max" or "factorial:eps:min:max".
std::vector<std::int64_t> parse_schedule(const std::string& text);

LilTrajectory lil_track(const lpp::WeightField& field, LppKind kind, const std::vector<std::int64_t>& schedule,
                        lpp::Convention c = lpp::Convention::exclude_initial);

enum class CrossingRule { midpoint };

struct TfSize {
  std::int64_t n;
  double std_psi;
  std::size_t count;
};

struct TfScanResult {
  double slope;
  double intercept;
  std::vector<TfSize> sizes;
};

using FieldFactory = std::function<lpp::WeightField(std::uint64_t field_index)>;

/// psi of the geodesic at time r = n (p2p to (n,n), or p2l to L_{2n}) over fields
/// first_field .. first_field + fields - 1, then the slope of log std(psi) against log n.
TfScanResult tf_scan(const FieldFactory& factory, std::uint64_t first_field, std::size_t fields,
                     const std::vector<std::int64_t>& sizes, CrossingRule rule, LppKind kind, unsigned workers = 1);

struct SuperadditiveReport {
  bool passed;
  std::size_t violations;
  std::size_t reps;
  double correlation;
  double correlation_se;
  double min_margin;  // min over reps of T_{2n} - (T_n + T_{v_n, L_{4n}})
};

/// Checks T^{p2l}_{mn} >= sum of m point-to-line legs, each starting where the previous leg's
/// geodesic ends, and the correlation of the first two legs.
SuperadditiveReport superadditive_product_check(std::int64_t n, std::int64_t m, std::size_t reps,
                                                const FieldFactory& factory, std::uint64_t first_field = 0);

}  // namespace betatails::stats
