#include "betatails/parallel.hpp"
#include "betatails/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace betatails::stats {

namespace {

using ensembles::EnsembleSpec;
using ensembles::Kind;

class MatrixReplicate final : public TailReplicate {
 public:
  MatrixReplicate(tridiag::SymTridiagonal t, const EnsembleSpec& spec) : t_(std::move(t)), spec_(spec) {}

  bool hit(Side side, double t) const override {
    const double scaled = side == Side::right ? t : -t;
    const double raw = spec_.kind == Kind::hermite ? ensembles::hermite_unscale(scaled, spec_.n)
                                                   : ensembles::laguerre_unscale(scaled, spec_.n, spec_.m);
    const std::size_t below = tridiag::sturm_count(t_, raw);
    // lambda_max >= raw iff some eigenvalue is not strictly below raw.
    return side == Side::right ? below < t_.size() : below == t_.size();
  }

 private:
  tridiag::SymTridiagonal t_;
  EnsembleSpec spec_;
};

class MatrixSampler final : public TailSampler {
 public:
  explicit MatrixSampler(const EnsembleSpec& spec) : spec_(spec) { spec_.validate(); }

  std::unique_ptr<TailReplicate> draw(std::uint64_t master_seed, std::uint64_t rep) const override {
    rng::RngStream s(master_seed, rep);
    if (spec_.kind == Kind::hermite) {
      return std::make_unique<MatrixReplicate>(ensembles::sample_hermite_modified(spec_, s), spec_);
    }
    return std::make_unique<MatrixReplicate>(tridiag::bidiag_gram(ensembles::sample_laguerre_modified(spec_, s)), spec_);
  }

 private:
  EnsembleSpec spec_;
};

class ScalarReplicate final : public TailReplicate {
 public:
  explicit ScalarReplicate(double scaled) : scaled_(scaled) {}
  bool hit(Side side, double t) const override { return side == Side::right ? scaled_ >= t : scaled_ <= -t; }

 private:
  double scaled_;
};

class LppSampler final : public TailSampler {
 public:
  LppSampler(LppKind kind, std::int64_t n, lpp::Convention c) : kind_(kind), n_(n), c_(c) {
    if (n < 1) throw std::invalid_argument("lpp_tail_sampler: n must be at least 1");
  }

  std::unique_ptr<TailReplicate> draw(std::uint64_t master_seed, std::uint64_t rep) const override {
    lpp::WeightField::Options opts;
    opts.half_space = kind_ == LppKind::hs;
    const auto field = lpp::WeightField::exponential(replicate_field_seed(master_seed, rep), opts);
    const double T = lpp_passage(kind_, field, n_, c_);
    const double nd = static_cast<double>(n_);
    return std::make_unique<ScalarReplicate>((T - 4.0 * nd) / (std::pow(2.0, 4.0 / 3.0) * std::cbrt(nd)));
  }

 private:
  LppKind kind_;
  std::int64_t n_;
  lpp::Convention c_;
};

}  // namespace

std::unique_ptr<TailSampler> matrix_tail_sampler(const EnsembleSpec& spec) { return std::make_unique<MatrixSampler>(spec); }

std::unique_ptr<TailSampler> lpp_tail_sampler(LppKind kind, std::int64_t n, lpp::Convention c) {
  return std::make_unique<LppSampler>(kind, n, c);
}

std::uint64_t replicate_field_seed(std::uint64_t master_seed, std::uint64_t rep) {
  rng::RngStream s(master_seed, rep);
  return s.next_u64();
}

double lpp_passage(LppKind kind, const lpp::WeightField& f, std::int64_t n, lpp::Convention c) {
  const lpp::Vertex origin{0, 0}, corner{n, n};
  switch (kind) {
    case LppKind::p2p: return lpp::passage_p2p(f, origin, corner, c);
    case LppKind::p2l: return lpp::passage_p2l(f, origin, 2 * n, c).value;
    case LppKind::l2p: return lpp::passage_l2p(f, 0, corner, c).value;
    case LppKind::hs:
      if (!f.half_space()) throw std::invalid_argument("lpp_passage: half-space kind needs a half-space field");
      // Equal to the full symmetric box, at half the cost.
      return lpp::passage_above_diagonal(f, origin, corner, c);
  }
  throw std::invalid_argument("lpp_passage: unknown kind");
}

LppKind parse_lpp_kind(const std::string& name) {
  if (name == "p2p") return LppKind::p2p;
  if (name == "p2l") return LppKind::p2l;
  if (name == "l2p") return LppKind::l2p;
  if (name == "hs") return LppKind::hs;
  throw std::invalid_argument("unknown passage kind '" + name + "'");
}

std::string to_string(LppKind k) {
  switch (k) {
    case LppKind::p2p: return "p2p";
    case LppKind::p2l: return "p2l";
    case LppKind::l2p: return "l2p";
    case LppKind::hs: return "hs";
  }
  return "unknown";
}

std::vector<TailCurve> mc_tails(const TailSampler& sampler, const std::vector<TailQuery>& queries, std::uint64_t reps,
                                std::uint64_t master_seed, unsigned workers) {
  if (reps < 100) throw std::invalid_argument("mc_tail: reps must be at least 100");
  if (queries.empty()) throw std::invalid_argument("mc_tail: no queries");
  std::size_t cells = 0;
  for (const auto& q : queries) {
    if (q.t_grid.empty()) throw std::invalid_argument("mc_tail: empty threshold grid");
    cells += q.t_grid.size();
  }
  using Counts = std::vector<std::uint64_t>;
  const auto blocks = run_blocks<Counts>(reps, 256, workers, [&](std::size_t begin, std::size_t end) {
    Counts counts(cells, 0);
    for (std::size_t r = begin; r < end; ++r) {
      const auto rep = sampler.draw(master_seed, r);
      std::size_t idx = 0;
      for (const auto& q : queries) {
        for (double t : q.t_grid) counts[idx++] += rep->hit(q.side, t) ? 1 : 0;
      }
    }
    return counts;
  });
  Counts total(cells, 0);
  for (const auto& b : blocks) {
    for (std::size_t k = 0; k < cells; ++k) total[k] += b[k];
  }
  std::vector<TailCurve> curves;
  std::size_t idx = 0;
  for (const auto& q : queries) {
    TailCurve curve;
    curve.side = q.side;
    curve.target_power = sampler.target_power(q.side);
    for (double t : q.t_grid) {
      const std::uint64_t hits = total[idx++];
      const auto ci = wilson_interval(hits, reps);
      curve.points.push_back({t, static_cast<double>(hits) / static_cast<double>(reps), ci.lo, ci.hi, reps, hits});
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

TailCurve mc_tail(const TailSampler& sampler, Side side, std::span<const double> t_grid, std::uint64_t reps,
                  std::uint64_t master_seed, unsigned workers) {
  return mc_tails(sampler, {TailQuery{side, std::vector<double>(t_grid.begin(), t_grid.end())}}, reps, master_seed,
                  workers)
      .front();
}

std::vector<std::uint8_t> mc_indicators(const TailSampler& sampler, Side side, double t, std::uint64_t reps,
                                        std::uint64_t master_seed) {
  std::vector<std::uint8_t> out(reps);
  for (std::uint64_t r = 0; r < reps; ++r) out[r] = sampler.draw(master_seed, r)->hit(side, t) ? 1 : 0;
  return out;
}

}  // namespace betatails::stats
