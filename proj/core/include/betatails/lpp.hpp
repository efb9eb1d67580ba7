#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace betatails::lpp {

struct Vertex {
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

inline std::int64_t phi(Vertex v) { return v.x + v.y; }
inline std::int64_t psi(Vertex v) { return v.x - v.y; }

struct LatticeCoords {
  std::int64_t phi;
  std::int64_t psi;
  /// Throws when phi + psi is odd.
  Vertex to_vertex() const;
};

LatticeCoords to_lattice(Vertex v);

enum class Convention { include_both, exclude_initial, exclude_final };

/// Deterministic field of Exp(1) vertex weights.
///
/// Random fields hash (seed, i, j) through Philox, so every weight is a pure function of its
/// coordinates and all passage times computed from one field are coupled. Weights are rounded to
/// the dyadic grid 2^-31 (offset by half a step, so never zero). Any path sum below 2^22 is
/// therefore exact in double precision and independent of summation order.
class WeightField {
 public:
  struct Options {
    bool half_space = false;
    bool zero_diagonal = false;
    std::size_t cache_tiles = 256;
  };

  static WeightField exponential(std::uint64_t seed);
  static WeightField exponential(std::uint64_t seed, Options options);
  /// Arbitrary weights, e.g. crafted test fields. half_space asserts fn is symmetric.
  static WeightField custom(std::function<double(Vertex)> fn, bool half_space = false);
  /// Explicit rows: weight(i, j) = rows[i][j] for 0 <= i, 0 <= j in range, zero elsewhere.
  static WeightField from_grid(std::vector<std::vector<double>> rows, bool half_space = false);

  /// Random access through the tile cache.
  double weight(Vertex v) const;
  double operator()(std::int64_t i, std::int64_t j) const { return weight({i, j}); }
  /// weight(i, j) for j = j0 .. j0 + out.size() - 1, evaluated directly (no cache traffic).
  void fill_row(std::int64_t i, std::int64_t j0, std::span<double> out) const;

  bool half_space() const { return half_space_; }
  bool is_random() const { return !custom_; }
  std::uint64_t seed() const { return seed_; }

  WeightField(const WeightField&) = default;
  WeightField& operator=(const WeightField&) = default;

 private:
  WeightField() = default;
  double raw(std::int64_t i, std::int64_t j) const;

  struct TileCache;
  std::uint64_t seed_ = 0;
  bool half_space_ = false;
  bool zero_diagonal_ = false;
  std::function<double(Vertex)> custom_;
  std::shared_ptr<TileCache> cache_;
};

/// The Exp(1) weight at (i, j) of the full-plane field with this seed.
double exponential_weight(std::uint64_t seed, std::int64_t i, std::int64_t j);

struct Geodesic {
  std::vector<Vertex> vertices;
  Vertex start() const { return vertices.front(); }
  Vertex end() const { return vertices.back(); }
};

struct LineResult {
  double value;
  Vertex argmax;
};

double passage_p2p(const WeightField& f, Vertex u, Vertex v, Convention c = Convention::exclude_initial);
LineResult passage_p2l(const WeightField& f, Vertex u, std::int64_t r, Convention c = Convention::exclude_initial);
LineResult passage_l2p(const WeightField& f, std::int64_t r, Vertex v, Convention c = Convention::exclude_initial);
double passage_halfspace(const WeightField& f, Vertex u, Vertex v, Convention c = Convention::exclude_initial);
/// Paths kept weakly above the diagonal (x <= y), any field.
double passage_above_diagonal(const WeightField& f, Vertex u, Vertex v, Convention c = Convention::exclude_initial);

Geodesic geodesic(const WeightField& f, Vertex u, Vertex v, Convention c = Convention::exclude_initial);
/// Geodesic from u to its maximising endpoint on L_r.
Geodesic geodesic_p2l(const WeightField& f, Vertex u, std::int64_t r, Convention c = Convention::exclude_initial);
Vertex geodesic_crossing(const Geodesic& g, std::int64_t r);
/// Sum of weights along the path under the convention, accumulated from the start.
double path_weight(const WeightField& f, const Geodesic& g, Convention c);

/// max over u on L_0 with |psi(u)| <= w of T_{u,v}, one sweep.
double interval_to_point(const WeightField& f, std::int64_t w, Vertex v, Convention c = Convention::exclude_initial);
/// Paths with |psi(x) - line(phi(x))| <= halfwidth, line being the straight u -> v segment.
double constrained_passage(const WeightField& f, Vertex u, Vertex v, double halfwidth,
                           Convention c = Convention::exclude_initial);

/// T_m = T_{(0,0),(m,m)} for m = 1..n from one sweep. Entry m-1 holds T_m.
std::vector<double> diagonal_passage_times(const WeightField& f, std::int64_t n, Convention c = Convention::exclude_initial);
/// inf over 1 <= m <= n of T_m - 4m.
double running_min_statistic(const WeightField& f, std::int64_t n, Convention c = Convention::exclude_initial);

enum class LilSign { plus, minus };
double g_plus(double n);
double g_minus(double n);
double lil_normalize(double T, std::int64_t n, LilSign sign);

Convention parse_convention(const std::string& name);
std::string to_string(Convention c);


/// T^{p2l}_m = T_{(0,0), L_{2m}} for m = 1..n from one sweep. Entry m-1 holds T_m.
std::vector<double> p2l_passage_times(const WeightField& f, std::int64_t n, Convention c = Convention::exclude_initial);
/// T^{l2p}_m = T_{L_0, (m,m)} for m = 1..n from one sweep.
std::vector<double> l2p_passage_times(const WeightField& f, std::int64_t n, Convention c = Convention::exclude_initial);

}  // namespace betatails::lpp
