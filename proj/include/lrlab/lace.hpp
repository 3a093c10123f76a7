#pragma once

#include "lrlab/greens.hpp"
#include "lrlab/kernel.hpp"
#include "lrlab/lattice.hpp"

#include <optional>

namespace lrlab {

struct LaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NeumannInverse {
  Field inverse;
  // delta - inverse
  Field Pi;
  int terms = 0;
  // max_k |1 - h^(k)|
  double rho = 0.0;
  // sup |h * inverse - delta|
  double residual = 0.0;
};

// h^{-1} = sum_{n>=0} (delta - h)^{*n}; refuses inputs with max_k |1 - h^(k)| >= 1.
NeumannInverse neumann_inverse(const Field& h, double tol, int n_cap = 10000);

struct ConvBound {
  double C = 0.0;
  Point argmax;
};

// 1 at the origin, L^{-(d+phi)} <x/L>_1^{-(d+theta)} (log <x/L>_1)^{-psi} elsewhere
Field envelope(const Box& box, double L, double theta, double phi, double psi);

// Smallest C with |f1 * f2| <= C * envelope; throws if f1 or f2 exceed the envelope.
ConvBound conv_bound_check(const Field& f1, const Field& f2, double theta, double phi, double psi,
                           const KernelSpec& spec);

struct PiDecayReport {
  // sup_{x!=0} |Pi(x)| (L^d <x/L>_1^{d - alpha^2})^ell
  double sup_constant = 0.0;
  // sum_{x!=0} |Pi(x)| L^{(ell-1) d}
  double sum_constant = 0.0;
};

// ell (d - alpha^2) >= d + alpha
bool exponent_condition(const KernelSpec& spec);
// alpha <= 2 + (ell - 1)(d - d_c); lace pipelines are refused otherwise.
bool alpha_regime_ok(const KernelSpec& spec);

struct LaceData {
  Field Pi;
  double p = 0.0;
  double Pi0 = 0.0;
  double mu_p = 0.0;
  double A_p = 0.0;
  StepDistribution tildeD;
  double positivity_margin = 0.0;
  Point margin_argmin;
  // max_x |tildeD/D - 1| and max_{k!=0} |(1 - tildeD^)/(1 - D^) - 1|
  double space_deviation = 0.0;
  double fourier_deviation = 0.0;
  std::optional<PiDecayReport> decay_constants;
};

inline constexpr double kMinActivity = 0.0;
inline constexpr double kMaxActivity = 1.2;

LaceData build_tilde_D(double p, const StepDistribution& D, const Field& Pi);

struct BootstrapEvaluation {
  double p = 0.0;
  double b_value = 0.0;
  Point argmax_x;
  double K_C_used = 0.0;
};

BootstrapEvaluation bootstrap_b(const Field& G, const KernelSpec& spec, double p, double K_C);

struct IdentityReport {
  double sup_abs = 0.0;
  // max over 0 <= |x| <= M/8 of |G - A S| / (A S)
  double sup_rel = 0.0;
  double chi = 0.0;
  // A_p / (1 - mu_p)
  double chi_bridge = 0.0;
  // |1 - 1/chi - p - sum Pi|
  double subcritical_defect = 0.0;
  bool pass = false;
};

IdentityReport verify_identity(const Field& G, const LaceData& lace, double tol);

}  // namespace lrlab
