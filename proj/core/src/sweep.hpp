#pragma once

// Row-by-row dynamic programme over a lattice region. Each row i carries a contiguous column
// range; start and final cells are flagged per row. The frontier is one row, so memory is
// O(width) unless choices are recorded for backtracking.

#include "betatails/lpp.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace betatails::lpp::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct RowSpec {
  std::int64_t lo = 1, hi = 0;              // empty by default
  std::int64_t start_lo = 1, start_hi = 0;  // start cells in this row
  std::int64_t final_lo = 1, final_hi = 0;  // cells whose own weight is dropped under exclude_final

  bool empty() const { return lo > hi; }
  bool is_start(std::int64_t j) const { return j >= start_lo && j <= start_hi; }
  bool is_final(std::int64_t j) const { return j >= final_lo && j <= final_hi; }
};

struct Region {
  std::int64_t i0 = 0;
  std::vector<RowSpec> rows;

  const RowSpec* row(std::int64_t i) const {
    if (i < i0 || i >= i0 + static_cast<std::int64_t>(rows.size())) return nullptr;
    return &rows[static_cast<std::size_t>(i - i0)];
  }
};

enum Choice : std::uint8_t { kFromLeft = 0, kFromUp = 1, kStart = 2, kUnreachable = 3 };

struct ChoiceStore {
  std::vector<std::uint8_t> data;
  std::vector<std::size_t> offset;  // per row

  std::uint8_t at(const Region& reg, Vertex v) const {
    const RowSpec* rs = reg.row(v.x);
    if (rs == nullptr || v.y < rs->lo || v.y > rs->hi) throw std::logic_error("choice lookup outside region");
    return data[offset[static_cast<std::size_t>(v.x - reg.i0)] + static_cast<std::size_t>(v.y - rs->lo)];
  }
};

/// visit(i, lo, span G) is called after each row; G[k] belongs to column lo + k.
template <class Visit>
void sweep(const WeightField& f, const Region& reg, Convention c, ChoiceStore* choices, Visit&& visit) {
  std::vector<double> prev, cur, w;
  std::int64_t plo = 1, phi_ = 0;
  const bool drop_initial = c == Convention::exclude_initial;
  const bool drop_final = c == Convention::exclude_final;
  if (choices != nullptr) {
    choices->data.clear();
    choices->offset.assign(reg.rows.size(), 0);
  }
  for (std::size_t r = 0; r < reg.rows.size(); ++r) {
    const RowSpec& rs = reg.rows[r];
    const std::int64_t i = reg.i0 + static_cast<std::int64_t>(r);
    if (choices != nullptr) choices->offset[r] = choices->data.size();
    if (rs.empty()) {
      cur.clear();
      visit(i, rs.lo, std::span<const double>(cur));
      prev.swap(cur);
      plo = 1;
      phi_ = 0;
      continue;
    }
    const auto len = static_cast<std::size_t>(rs.hi - rs.lo + 1);
    w.resize(len);
    cur.resize(len);
    f.fill_row(i, rs.lo, std::span<double>(w));

    auto general = [&](std::size_t k) {
      const std::int64_t j = rs.lo + static_cast<std::int64_t>(k);
      const double up = (j >= plo && j <= phi_) ? prev[static_cast<std::size_t>(j - plo)] : kNegInf;
      const double left = k > 0 ? cur[k - 1] : kNegInf;
      const bool from_up = up >= left;  // ties go to the (i-1, j) predecessor
      const double best = from_up ? up : left;
      const bool fin = drop_final && rs.is_final(j);
      double g;
      std::uint8_t choice;
      if (rs.is_start(j)) {
        g = (drop_initial || fin) ? 0.0 : w[k];
        choice = kStart;
      } else if (best == kNegInf) {
        g = kNegInf;
        choice = kUnreachable;
      } else {
        g = fin ? best : best + w[k];
        choice = from_up ? kFromUp : kFromLeft;
      }
      cur[k] = g;
      if (choices != nullptr) choices->data.push_back(choice);
    };

    // Cells k >= 1 take a branch-free loop when none of them is a start or a weight-dropping
    // final and the previous row covers them. -inf passes through max and + unchanged.
    const bool has_start_after_first = rs.start_lo <= rs.start_hi && rs.start_hi > rs.lo;
    const bool has_dropped_final = drop_final && rs.final_lo <= rs.final_hi;
    const bool plain = choices == nullptr && phi_ >= rs.hi && plo <= rs.lo + 1 && !has_start_after_first &&
                       !has_dropped_final;
    general(0);
    if (plain && len > 1) {
      const auto off = static_cast<std::ptrdiff_t>(rs.lo - plo);
      double left = cur[0];
      for (std::size_t k = 1; k < len; ++k) {
        const double u = prev[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + off)];
        const double g = (u >= left ? u : left) + w[k];
        cur[k] = g;
        left = g;
      }
    } else {
      for (std::size_t k = 1; k < len; ++k) general(k);
    }

    visit(i, rs.lo, std::span<const double>(cur));
    prev.swap(cur);
    plo = rs.lo;
    phi_ = rs.hi;
  }
}

inline std::vector<Vertex> backtrack(const Region& reg, const ChoiceStore& choices, Vertex end) {
  std::vector<Vertex> path{end};
  Vertex v = end;
  for (;;) {
    const auto ch = choices.at(reg, v);
    if (ch == kStart) break;
    if (ch == kUnreachable) throw std::logic_error("backtrack from an unreachable cell");
    v = ch == kFromUp ? Vertex{v.x - 1, v.y} : Vertex{v.x, v.y - 1};
    path.push_back(v);
  }
  return {path.rbegin(), path.rend()};
}

}  // namespace betatails::lpp::detail
