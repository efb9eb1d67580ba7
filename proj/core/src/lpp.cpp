#include "betatails/lpp.hpp"

#include "sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betatails::lpp {

using detail::ChoiceStore;
using detail::kNegInf;
using detail::Region;
using detail::RowSpec;

namespace {

void require_ordered(Vertex u, Vertex v) {
  if (u.x > v.x || u.y > v.y) throw std::invalid_argument("lpp: endpoints must satisfy u <= v coordinatewise");
}

Region box_region(Vertex u, Vertex v) {
  Region reg{u.x, std::vector<RowSpec>(static_cast<std::size_t>(v.x - u.x + 1))};
  for (auto& rs : reg.rows) {
    rs.lo = u.y;
    rs.hi = v.y;
  }
  reg.rows.front().start_lo = reg.rows.front().start_hi = u.y;
  reg.rows.back().final_lo = reg.rows.back().final_hi = v.y;
  return reg;
}

Region above_diagonal_region(Vertex u, Vertex v) {
  if (u.x > u.y || v.x > v.y) throw std::invalid_argument("lpp: above-diagonal endpoints need x <= y");
  Region reg = box_region(u, v);
  for (std::size_t r = 0; r < reg.rows.size(); ++r) {
    auto& rs = reg.rows[r];
    rs.lo = std::max(rs.lo, reg.i0 + static_cast<std::int64_t>(r));
  }
  return reg;
}

// Cells x >= u with phi(x) <= r; the cells on L_r are the finals.
Region p2l_region(Vertex u, std::int64_t r) {
  const std::int64_t depth = r - phi(u);
  Region reg{u.x, std::vector<RowSpec>(static_cast<std::size_t>(depth + 1))};
  for (std::size_t k = 0; k < reg.rows.size(); ++k) {
    auto& rs = reg.rows[k];
    const std::int64_t i = u.x + static_cast<std::int64_t>(k);
    rs.lo = u.y;
    rs.hi = r - i;
    rs.final_lo = rs.final_hi = rs.hi;
  }
  reg.rows.front().start_lo = reg.rows.front().start_hi = u.y;
  return reg;
}

// Cells x <= v reachable from the starts (a, r - a) with a in [a_lo, a_hi].
Region line_start_region(std::int64_t r, std::int64_t a_lo, std::int64_t a_hi, Vertex v) {
  a_lo = std::max(a_lo, r - v.y);
  a_hi = std::min(a_hi, v.x);
  if (a_lo > a_hi) return Region{};
  Region reg{a_lo, std::vector<RowSpec>(static_cast<std::size_t>(v.x - a_lo + 1))};
  for (std::size_t k = 0; k < reg.rows.size(); ++k) {
    auto& rs = reg.rows[k];
    const std::int64_t i = a_lo + static_cast<std::int64_t>(k);
    rs.lo = r - std::min(a_hi, i);
    rs.hi = v.y;
    if (i <= a_hi) rs.start_lo = rs.start_hi = r - i;
  }
  reg.rows.back().final_lo = reg.rows.back().final_hi = v.y;
  return reg;
}

double value_at(const Region& reg, const WeightField& f, Convention c, Vertex v, ChoiceStore* choices = nullptr) {
  double out = kNegInf;
  detail::sweep(f, reg, c, choices, [&](std::int64_t i, std::int64_t lo, std::span<const double> g) {
    if (i == v.x && v.y >= lo && v.y < lo + static_cast<std::int64_t>(g.size())) {
      out = g[static_cast<std::size_t>(v.y - lo)];
    }
  });
  return out;
}

LineResult p2l_sweep(const WeightField& f, Vertex u, std::int64_t r, Convention c, ChoiceStore* choices,
                     Region* region_out = nullptr) {
  if (r < phi(u)) throw std::invalid_argument("passage_p2l: line lies below the start");
  Region reg = p2l_region(u, r);
  LineResult best{kNegInf, u};
  detail::sweep(f, reg, c, choices, [&](std::int64_t i, std::int64_t lo, std::span<const double> g) {
    if (g.empty()) return;
    const double val = g.back();
    if (val > best.value) best = {val, Vertex{i, lo + static_cast<std::int64_t>(g.size()) - 1}};
  });
  if (region_out != nullptr) *region_out = std::move(reg);
  return best;
}

}  // namespace

double passage_p2p(const WeightField& f, Vertex u, Vertex v, Convention c) {
  require_ordered(u, v);
  return value_at(box_region(u, v), f, c, v);
}

LineResult passage_p2l(const WeightField& f, Vertex u, std::int64_t r, Convention c) {
  return p2l_sweep(f, u, r, c, nullptr);
}

LineResult passage_l2p(const WeightField& f, std::int64_t r, Vertex v, Convention c) {
  if (r > phi(v)) throw std::invalid_argument("passage_l2p: line lies above the end point");
  const Region reg = line_start_region(r, r - v.y, v.x, v);
  ChoiceStore choices;
  const double value = value_at(reg, f, c, v, &choices);
  return {value, detail::backtrack(reg, choices, v).front()};
}

double passage_halfspace(const WeightField& f, Vertex u, Vertex v, Convention c) {
  if (!f.half_space()) throw std::invalid_argument("passage_halfspace: field is not half-space symmetric");
  return passage_p2p(f, u, v, c);
}

double passage_above_diagonal(const WeightField& f, Vertex u, Vertex v, Convention c) {
  require_ordered(u, v);
  return value_at(above_diagonal_region(u, v), f, c, v);
}

Geodesic geodesic(const WeightField& f, Vertex u, Vertex v, Convention c) {
  require_ordered(u, v);
  const Region reg = box_region(u, v);
  ChoiceStore choices;
  value_at(reg, f, c, v, &choices);
  return {detail::backtrack(reg, choices, v)};
}

Geodesic geodesic_p2l(const WeightField& f, Vertex u, std::int64_t r, Convention c) {
  Region reg;
  ChoiceStore choices;
  const auto res = p2l_sweep(f, u, r, c, &choices, &reg);
  return {detail::backtrack(reg, choices, res.argmax)};
}

Vertex geodesic_crossing(const Geodesic& g, std::int64_t r) {
  if (g.vertices.empty()) throw std::invalid_argument("geodesic_crossing: empty path");
  const std::int64_t start = phi(g.start());
  if (r < start || r > phi(g.end())) throw std::invalid_argument("geodesic_crossing: r outside the path's time range");
  // Each step raises phi by exactly one, so index r - start carries phi = r.
  return g.vertices[static_cast<std::size_t>(r - start)];
}

double path_weight(const WeightField& f, const Geodesic& g, Convention c) {
  const std::size_t n = g.vertices.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 && c == Convention::exclude_initial) continue;
    if (k + 1 == n && c == Convention::exclude_final) continue;
    sum = (k == 0) ? f.weight(g.vertices[k]) : sum + f.weight(g.vertices[k]);
  }
  return sum;
}

double interval_to_point(const WeightField& f, std::int64_t w, Vertex v, Convention c) {
  if (w < 0) throw std::invalid_argument("interval_to_point: empty interval");
  if (phi(v) < 0) throw std::invalid_argument("interval_to_point: end point lies below L_0");
  // u = (a, -a) has psi = 2a.
  const std::int64_t a_hi = w / 2;
  const Region reg = line_start_region(0, -a_hi, a_hi, v);
  if (reg.rows.empty()) throw std::invalid_argument("interval_to_point: no start in the interval lies below v");
  const double value = value_at(reg, f, c, v);
  if (value == kNegInf) throw std::invalid_argument("interval_to_point: end point unreachable");
  return value;
}

double constrained_passage(const WeightField& f, Vertex u, Vertex v, double halfwidth, Convention c) {
  require_ordered(u, v);
  if (!(halfwidth > 0.0)) throw std::invalid_argument("constrained_passage: halfwidth must be positive");
  Region reg = box_region(u, v);
  const double span_phi = static_cast<double>(phi(v) - phi(u));
  const double slope = span_phi > 0 ? static_cast<double>(psi(v) - psi(u)) / span_phi : 0.0;
  for (std::size_t r = 0; r < reg.rows.size(); ++r) {
    auto& rs = reg.rows[r];
    const std::int64_t i = reg.i0 + static_cast<std::int64_t>(r);
    std::int64_t lo = rs.hi + 1, hi = rs.lo - 1;
    for (std::int64_t j = rs.lo; j <= rs.hi; ++j) {
      const Vertex x{i, j};
      const double line = static_cast<double>(psi(u)) + slope * static_cast<double>(phi(x) - phi(u));
      if (std::abs(static_cast<double>(psi(x)) - line) <= halfwidth) {
        lo = std::min(lo, j);
        hi = std::max(hi, j);
      }
    }
    rs.lo = lo;
    rs.hi = hi;
  }
  const double value = value_at(reg, f, c, v);
  if (value == kNegInf) throw std::invalid_argument("constrained_passage: corridor disconnects the end points");
  return value;
}

std::vector<double> diagonal_passage_times(const WeightField& f, std::int64_t n, Convention c) {
  if (n < 1) throw std::invalid_argument("diagonal_passage_times: n must be at least 1");
  // In a symmetric field the above-diagonal triangle gives the same values at half the cost.
  const Region reg = f.half_space() ? above_diagonal_region({0, 0}, {n, n}) : box_region({0, 0}, {n, n});
  const Convention sweep_c = c == Convention::exclude_final ? Convention::include_both : c;
  std::vector<double> out(static_cast<std::size_t>(n));
  double prev_above = kNegInf;  // G(m-1, m) from the previous row
  detail::sweep(f, reg, sweep_c, nullptr, [&](std::int64_t i, std::int64_t lo, std::span<const double> g) {
    auto at = [&](std::int64_t j) {
      return (j >= lo && j < lo + static_cast<std::int64_t>(g.size())) ? g[static_cast<std::size_t>(j - lo)] : kNegInf;
    };
    if (i >= 1) {
      const double diag = at(i);
      out[static_cast<std::size_t>(i - 1)] =
          c == Convention::exclude_final ? std::max(prev_above, at(i - 1)) : diag;
    }
    prev_above = at(i + 1);
  });
  return out;
}

double running_min_statistic(const WeightField& f, std::int64_t n, Convention c) {
  const auto times = diagonal_passage_times(f, n, c);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < times.size(); ++k) best = std::min(best, times[k] - 4.0 * static_cast<double>(k + 1));
  return best;
}

std::vector<double> p2l_passage_times(const WeightField& f, std::int64_t n, Convention c) {
  if (n < 1) throw std::invalid_argument("p2l_passage_times: n must be at least 1");
  // T_{0,L_r} with the final weight dropped equals the maximum of G over L_{r-1} (include-final sweep).
  const bool drop_final = c == Convention::exclude_final;
  const Region reg = p2l_region({0, 0}, 2 * n);
  std::vector<double> line_max(static_cast<std::size_t>(2 * n + 1), kNegInf);
  const Convention sweep_c = drop_final ? Convention::include_both : c;
  Region open = reg;
  for (auto& rs : open.rows) rs.final_lo = 1, rs.final_hi = 0;
  detail::sweep(f, open, sweep_c, nullptr, [&](std::int64_t i, std::int64_t lo, std::span<const double> g) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto r = static_cast<std::size_t>(i + lo + static_cast<std::int64_t>(k));
      line_max[r] = std::max(line_max[r], g[k]);
    }
  });
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t m = 1; m <= n; ++m) {
    out[static_cast<std::size_t>(m - 1)] = line_max[static_cast<std::size_t>(drop_final ? 2 * m - 1 : 2 * m)];
  }
  return out;
}

std::vector<double> l2p_passage_times(const WeightField& f, std::int64_t n, Convention c) {
  if (n < 1) throw std::invalid_argument("l2p_passage_times: n must be at least 1");
  Region reg = line_start_region(0, -n, n, {n, n});
  reg.rows.back().final_lo = 1;
  reg.rows.back().final_hi = 0;
  const Convention sweep_c = c == Convention::exclude_final ? Convention::include_both : c;
  std::vector<double> out(static_cast<std::size_t>(n));
  double prev_above = kNegInf;
  detail::sweep(f, reg, sweep_c, nullptr, [&](std::int64_t i, std::int64_t lo, std::span<const double> g) {
    auto at = [&](std::int64_t j) {
      return (j >= lo && j < lo + static_cast<std::int64_t>(g.size())) ? g[static_cast<std::size_t>(j - lo)] : kNegInf;
    };
    if (i >= 1) {
      out[static_cast<std::size_t>(i - 1)] = c == Convention::exclude_final ? std::max(prev_above, at(i - 1)) : at(i);
    }
    prev_above = at(i + 1);
  });
  return out;
}

double g_plus(double n) { return std::pow(2.0, 4.0 / 3.0) * std::cbrt(n) * std::pow(std::log(std::log(n)), 2.0 / 3.0); }

double g_minus(double n) { return std::pow(2.0, 4.0 / 3.0) * std::cbrt(n) * std::cbrt(std::log(std::log(n))); }

double lil_normalize(double T, std::int64_t n, LilSign sign) {
  if (n < 16) throw std::invalid_argument("lil_normalize: n must be at least 16");
  const double nd = static_cast<double>(n);
  return (T - 4.0 * nd) / (sign == LilSign::plus ? g_plus(nd) : g_minus(nd));
}

Convention parse_convention(const std::string& name) {
  if (name == "include_both") return Convention::include_both;
  if (name == "exclude_initial") return Convention::exclude_initial;
  if (name == "exclude_final") return Convention::exclude_final;
  throw std::invalid_argument("unknown convention '" + name + "'");
}

std::string to_string(Convention c) {
  switch (c) {
    case Convention::include_both: return "include_both";
    case Convention::exclude_initial: return "exclude_initial";
    case Convention::exclude_final: return "exclude_final";
  }
  return "unknown";
}

}  // namespace betatails::lpp
