#include "betatails/errors.hpp"
#include "betatails/parallel.hpp"
#include "betatails/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace betatails::stats {

namespace {

template <class Gen>
std::vector<std::int64_t> build_schedule(Gen gen, std::int64_t n_min, std::int64_t n_max) {
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("schedule: need 1 <= min <= max");
  std::vector<std::int64_t> out;
  for (std::int64_t k = 0;; ++k) {
    const double v = gen(k);
    if (!std::isfinite(v) || v > static_cast<double>(n_max)) break;
    const auto n = static_cast<std::int64_t>(std::floor(v));
    if (n >= n_min && (out.empty() || n > out.back())) out.push_back(n);
    if (k > 100000000) break;
  }
  return out;
}

}  // namespace

std::vector<std::int64_t> schedule_geometric(double rho, std::int64_t n_min, std::int64_t n_max) {
  if (!(rho > 1.0)) throw std::invalid_argument("geometric schedule: rho must exceed 1");
  return build_schedule([rho](std::int64_t k) { return std::pow(rho, static_cast<double>(k)); }, n_min, n_max);
}

std::vector<std::int64_t> schedule_stretched_exponential(double eps, std::int64_t n_min, std::int64_t n_max) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("stretched schedule: eps must lie in (0, 1)");
  return build_schedule([eps](std::int64_t k) { return std::exp(std::pow(static_cast<double>(k), 1.0 - eps)); },
                        n_min, n_max);
}

std::vector<std::int64_t> schedule_factorial_power(double eps, std::int64_t n_min, std::int64_t n_max) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("factorial schedule: eps must lie in (0, 1)");
  const double power = std::pow(1.0 - eps, 3);
  return build_schedule([power](std::int64_t k) { return std::exp(power * std::lgamma(static_cast<double>(k) + 1.0)); },
                        n_min, n_max);
}

std::vector<std::int64_t> parse_schedule(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4) throw std::invalid_argument("schedule must look like preset:param:min:max, got '" + text + "'");
  double param;
  std::int64_t lo, hi;
  try {
    param = std::stod(parts[1]);
    lo = std::stoll(parts[2]);
    hi = std::stoll(parts[3]);
  } catch (const std::exception&) {
    throw std::invalid_argument("schedule has a malformed number: '" + text + "'");
  }
  if (parts[0] == "geometric") return schedule_geometric(param, lo, hi);
  if (parts[0] == "stretched") return schedule_stretched_exponential(param, lo, hi);
  if (parts[0] == "factorial") return schedule_factorial_power(param, lo, hi);
  throw std::invalid_argument("unknown schedule preset '" + parts[0] + "'");
}

LilTrajectory lil_track(const lpp::WeightField& field, LppKind kind, const std::vector<std::int64_t>& schedule,
                        lpp::Convention c) {
  if (schedule.empty()) throw std::invalid_argument("lil_track: empty schedule");
  if (schedule.front() < 16) throw std::invalid_argument("lil_track: schedule must start at n >= 16");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k] <= schedule[k - 1]) throw std::invalid_argument("lil_track: schedule must be strictly increasing");
  }
  if ((kind == LppKind::hs) != field.half_space()) {
    throw std::invalid_argument("lil_track: half-space kind and half-space field must go together");
  }
  const std::int64_t n_max = schedule.back();
  std::vector<double> times;
  int tag = 2;
  switch (kind) {
    case LppKind::p2p: times = lpp::diagonal_passage_times(field, n_max, c); tag = 2; break;
    case LppKind::hs: times = lpp::diagonal_passage_times(field, n_max, c); tag = 4; break;
    case LppKind::p2l: times = lpp::p2l_passage_times(field, n_max, c); tag = 1; break;
    case LppKind::l2p: times = lpp::l2p_passage_times(field, n_max, c); tag = 1; break;
  }
  LilTrajectory traj{{}, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), tag};
  for (std::int64_t n : schedule) {
    const double T = times[static_cast<std::size_t>(n - 1)];
    const double plus = lpp::lil_normalize(T, n, lpp::LilSign::plus);
    const double minus = lpp::lil_normalize(T, n, lpp::LilSign::minus);
    traj.running_max_plus = std::max(traj.running_max_plus, plus);
    traj.running_min_minus = std::min(traj.running_min_minus, minus);
    traj.entries.push_back({n, T, plus, minus, traj.running_max_plus, traj.running_min_minus});
  }
  return traj;
}

TfScanResult tf_scan(const FieldFactory& factory, std::uint64_t first_field, std::size_t fields,
                     const std::vector<std::int64_t>& sizes, CrossingRule rule, LppKind kind, unsigned workers) {
  if (sizes.size() < 3) throw std::invalid_argument("tf_scan: need at least 3 sizes");
  if (fields < 200) throw std::invalid_argument("tf_scan: need at least 200 fields per size");
  if (kind != LppKind::p2p && kind != LppKind::p2l) throw std::invalid_argument("tf_scan: kind must be p2p or p2l");
  (void)rule;  // midpoint: r = n, half way along the geodesic
  TfScanResult result{0.0, 0.0, {}};
  std::vector<double> lx, ly;
  for (std::int64_t n : sizes) {
    if (n < 1) throw std::invalid_argument("tf_scan: sizes must be positive");
    const auto blocks = run_blocks<std::vector<double>>(fields, 32, workers, [&](std::size_t begin, std::size_t end) {
      std::vector<double> psis;
      for (std::size_t k = begin; k < end; ++k) {
        const auto f = factory(first_field + k);
        const auto g = kind == LppKind::p2p ? lpp::geodesic(f, {0, 0}, {n, n}) : lpp::geodesic_p2l(f, {0, 0}, 2 * n);
        psis.push_back(static_cast<double>(lpp::psi(lpp::geodesic_crossing(g, n))));
      }
      return psis;
    });
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (const auto& b : blocks) {
      for (double x : b) {
        sum += x;
        ++count;
      }
    }
    const double mean = sum / static_cast<double>(count);
    for (const auto& b : blocks) {
      for (double x : b) sum2 += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(sum2 / static_cast<double>(count - 1));
    result.sizes.push_back({n, sd, count});
    if (!(sd > 0.0)) continue;
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(sd));
  }
  if (lx.size() != sizes.size()) throw NumericalError("tf_scan: zero transversal spread at some size, slope undefined");
  const double k = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / k;
    my += ly[i] / k;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw NumericalError("tf_scan: sizes must be distinct");
  result.slope = sxy / sxx;
  result.intercept = my - result.slope * mx;
  return result;
}

SuperadditiveReport superadditive_product_check(std::int64_t n, std::int64_t m, std::size_t reps,
                                                const FieldFactory& factory, std::uint64_t first_field) {
  if (reps < 1000) throw std::invalid_argument("superadditive_product_check: reps must be at least 1000");
  if (n < 1 || m < 2) throw std::invalid_argument("superadditive_product_check: need n >= 1 and m >= 2");
  const auto c = lpp::Convention::exclude_initial;
  SuperadditiveReport rep{true, 0, reps, 0.0, 0.0, std::numeric_limits<double>::infinity()};
  std::vector<double> first(reps), second(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    const auto f = factory(first_field + k);
    const double whole = lpp::passage_p2l(f, {0, 0}, 2 * m * n, c).value;
    lpp::Vertex start{0, 0};
    double legs = 0.0;
    for (std::int64_t j = 1; j <= m; ++j) {
      const auto leg = lpp::passage_p2l(f, start, 2 * j * n, c);
      if (j == 1) first[k] = leg.value;
      if (j == 2) second[k] = leg.value;
      legs += leg.value;
      start = leg.argmax;
    }
    rep.min_margin = std::min(rep.min_margin, whole - legs);
    if (whole < legs) ++rep.violations;
  }
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    ma += first[k];
    mb += second[k];
  }
  ma /= static_cast<double>(reps);
  mb /= static_cast<double>(reps);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < reps; ++k) {
    sab += (first[k] - ma) * (second[k] - mb);
    saa += (first[k] - ma) * (first[k] - ma);
    sbb += (second[k] - mb) * (second[k] - mb);
  }
  rep.correlation = (saa > 0.0 && sbb > 0.0) ? sab / std::sqrt(saa * sbb) : 0.0;
  rep.correlation_se = 1.0 / std::sqrt(static_cast<double>(reps) - 1.0);
  rep.passed = rep.violations == 0 && std::abs(rep.correlation) <= 4.0 * rep.correlation_se;
  return rep;
}

}  // namespace betatails::stats
