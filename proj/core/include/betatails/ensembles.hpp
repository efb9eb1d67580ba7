#pragma once

#include "betatails/rng.hpp"
#include "betatails/tridiag.hpp"

#include <cstddef>
#include <utility>

namespace betatails::ensembles {

enum class Kind { hermite, laguerre };

/// beta, size n, Laguerre parameter m and modification depth p.
struct EnsembleSpec {
  double beta = 2.0;
  std::size_t n = 1;
  Kind kind = Kind::hermite;
  double m = 0.0;
  std::size_t p = 0;

  static EnsembleSpec hermite(double beta, std::size_t n, std::size_t p = 0);
  static EnsembleSpec laguerre(double beta, std::size_t n, double m, std::size_t p = 0);

  /// Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

struct ScaledStatistic {
  double raw_lambda_max;
  double scaled;
  EnsembleSpec spec;
};

struct ScalingConstants {
  double a;
  double b;
};

struct MatrixPair {
  tridiag::SymTridiagonal first;
  tridiag::SymTridiagonal second;
};

tridiag::SymTridiagonal sample_hermite(const EnsembleSpec& spec, rng::RngStream& s);
tridiag::LowerBidiagonal sample_laguerre(const EnsembleSpec& spec, rng::RngStream& s);
tridiag::SymTridiagonal sample_hermite_modified(const EnsembleSpec& spec, rng::RngStream& s);
tridiag::LowerBidiagonal sample_laguerre_modified(const EnsembleSpec& spec, rng::RngStream& s);

/// (H, H_hat): entries i <= p share one Gaussian zeta_i, the chi entry being F^{-1}(Phi(zeta_i)).
MatrixPair coupled_original_modified(const EnsembleSpec& spec, rng::RngStream& s);

double hermite_scale(double raw, std::size_t n);
double hermite_unscale(double scaled, std::size_t n);
double laguerre_scale(double raw, std::size_t n, double m);
double laguerre_unscale(double scaled, std::size_t n, double m);

ScaledStatistic hermite_scaled_max(const EnsembleSpec& spec, rng::RngStream& s, double tol);
ScaledStatistic laguerre_scaled_max(const EnsembleSpec& spec, rng::RngStream& s, double tol);

/// a = (1 + sqrt(gamma))^2, b = gamma^{-1/6} (1 + sqrt(gamma))^{4/3}.
ScalingConstants scaling_constants(double gamma);

/// first = sqrt(2) H_{ceil(beta n / 2), 2}, second = sqrt(beta) H_{n, beta}, quantile coupled.
MatrixPair domination_pair(double beta, std::size_t n, rng::RngStream& s);

/// ceil(beta n / 2) with a guard against representation error in beta n / 2.
std::size_t domination_size(double beta, std::size_t n);

}  // namespace betatails::ensembles
