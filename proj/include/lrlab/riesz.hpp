#pragma once

#include "lrlab/lattice.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace lrlab {

struct RieszError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

using Frequency = std::vector<double>;

// sum_{|x| <= R} (1 - |x|^2/R^2)^alpha f(x) e^{i k0.x}; R may not exceed M/2.
std::complex<double> bochner_riesz(const Field& f, double R, double alpha_BR, const Frequency& k0);

double default_alpha_BR(int d);

class RieszEvaluation {
 public:
  // Throws unless alpha_BR > (d-1)/2.
  RieszEvaluation(const Field& f, double R, double alpha_BR, Frequency k0);

  double R() const { return R_; }
  double alpha_BR() const { return alpha_; }
  const Frequency& k0() const { return k0_; }
  std::complex<double> value() const { return value_; }

 private:
  double R_;
  double alpha_;
  Frequency k0_;
  std::complex<double> value_;
};

struct ConvergenceRow {
  double R = 0.0;
  std::complex<double> value;
  double error = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // max error over the larger half of R_grid is below max error over the smaller half
  bool envelope_decays = false;
  // max over R of |B_R[u = 1](k0) - 1|
  double normalization_defect = 0.0;
  bool hypothesis_ok = true;
};

// u_ref returns u(k0). Set continuous_at_k0 = false for inputs whose spectrum jumps at k0;
// the report then flags the hypothesis and asserts nothing.
ConvergenceReport verify_convergence(const Field& f, const std::function<std::complex<double>(const Frequency&)>& u_ref,
                                     const Frequency& k0, const std::vector<double>& R_grid, double alpha_BR,
                                     bool continuous_at_k0 = true);

enum class Classification { Converges, Diverges, Undecided };
std::string to_string(Classification c);

struct DemoRow {
  double R = 0.0;
  double W = 0.0;
};

struct DemoReport {
  std::vector<DemoRow> rows;
  double sum_F = 0.0;
  double Fhat0 = 0.0;
  bool zero_mode_removed = false;
  // log W against log R
  double growth_slope = 0.0;
  double limit_estimate = 0.0;
  Classification classification = Classification::Undecided;
  bool monotone = false;
};

// G = inverse transform of 1/F^ (zero mode dropped when F^(0) = 0, then grounded at the
// antipodal corner), W(R) = sum_{|x|<=R} (1 - |x|^2/R^2)^alpha G(x).
DemoReport critical_sum_demo(const Field& F, const std::vector<double>& R_grid, double alpha_BR);

std::vector<double> geometric_grid(double lo, double hi, double ratio);

}  // namespace lrlab
