#pragma once

#include "lrlab/kernel.hpp"
#include "lrlab/lattice.hpp"

#include <string>
#include <vector>

namespace lrlab {

enum class Method { Series, Fourier };
std::string to_string(Method m);

struct GreensError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// S_mu = delta + sum_{n>=1} mu^n D^{*n} on the torus.
//
// At mu = 1 the torus sum diverges through the zero mode, so the series route
// returns the grounded representative sum_n [D^{*n}(x) - D^{*n}(x*)] with x*
// the antipodal corner; `grounded` is set in that case.
struct GreensFunction {
  KernelSpec spec;
  double mu = 0.0;
  Field values;
  Method method = Method::Series;
  double remainder_bound = 0.0;
  Index N_used = 0;
  bool grounded = false;
};

GreensFunction greens_series(const StepDistribution& D, double mu, double tol = 1e-12);
GreensFunction greens_fourier(const StepDistribution& D, double mu);

// f - f(x*): removes the spatially constant background the torus adds to
// near-critical fields.
Field grounded(const Field& f);
// Grounded values of S, unchanged if S is already grounded.
Field grounded_values(const GreensFunction& S);

// sup_x |S - delta - mu D * S|
double renewal_residual(const GreensFunction& S, const StepDistribution& D);

// Upper-bound envelope with K_C = 1, including the log-corrected variant at alpha = 2.
double upper_bound_formula(double r, double mu, const KernelSpec& spec);

struct BoundReport {
  double mu = 0.0;
  double sup_ratio = 0.0;
  Point argmax;
  double argmax_norm = 0.0;
  Index M = 0;
};

// Scans R(x) = (S(x) - delta)/bound(x) over all x != 0 of the grounded field.
BoundReport check_upper_bound(const GreensFunction& S);

// Relative change |v(2M) - v(M)| / |v(M)|.
double relative_drift(double base, double doubled);

struct HeatKernelTable {
  std::vector<Field> powers;
  std::vector<double> sup_norms;
  // c_sup(n) = ||D^{*n}||_inf L^d n^{d/(alpha^2)}, or (n log(pi n/2))^{d/2} at alpha = 2.
  std::vector<double> c_sup;
  // max over the window 0 < |x| <= window of D^{*n}(x) <x>_L^{d+alpha^2} / (n L^{alpha^2}),
  // divided by log<x/L>_1 at alpha = 2.
  std::vector<double> c_pt;
  double window = 0.0;
  int n_computed = 0;
  bool truncated = false;
  std::string notice;

  double max_c_sup() const;
  double max_c_pt() const;
};

// window <= 0 selects |x| <= M/8.
HeatKernelTable heat_iterates(const StepDistribution& D, int n_max, double window = 0.0,
                              bool keep_powers = true);

struct ProfileRow {
  double mu = 0.0;
  double x_norm = 0.0;
  double S = 0.0;
  double near_bound = 0.0;
  double far_bound = 0.0;
  double lower_bound = 0.0;
  bool far = false;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

struct CrossoverProfile {
  std::vector<ProfileRow> rows;
  // One entry per mu, in input order.
  std::vector<double> mus;
  std::vector<SlopeFit> near_fit;
  std::vector<SlopeFit> far_fit;
  std::vector<double> crossover_x;
  // min over rows with S > 0 of S / lower_bound, per mu.
  std::vector<double> lower_ratio_min;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Points xs are evaluated on grounded fields. Slopes use rows with 8L <= |x| <= M/8.
CrossoverProfile crossover_profile(const StepDistribution& D, const std::vector<double>& mus,
                                   const std::vector<Point>& xs);

// Least squares of log y against log x, optionally weighted.
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& weights = {});

}  // namespace lrlab
