#pragma once

#include "lrlab/lattice.hpp"

#include <string>

namespace lrlab {

enum class Model { RW, SAW, PERC, ISING };

Model parse_model(const std::string& name);
std::string to_string(Model m);
// Diagrammatic decay power: 3 for SAW, Ising and plain walks; 2 for percolation.
int ell(Model m);

struct KernelSpec {
  int d = 1;
  double alpha = 0.5;
  double L = 1.0;
  Model model = Model::RW;

  double alpha2() const { return alpha < 2.0 ? alpha : 2.0; }
  // (ell+1)/(ell-1) * min(alpha, 2)
  double d_c() const;
  void validate() const;
};

// <x>_L = (pi/2) max(|x|, L)
double nnnorm(double r, double L);
double nnnorm(const Point& x, double L);

struct StepDistribution {
  KernelSpec spec;
  Box box;
  Field D;
  Spectrum Dhat;
  double tail_mass_cut = 0.0;
  // Lattice sum of the unnormalized profile over the box; D = v / renorm_factor.
  double renorm_factor = 1.0;

  // Real part of Dhat as a plain array.
  Eigen::ArrayXd dhat_real() const { return Dhat.values().real(); }
};

struct KernelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultTailMassCap = 0.1;

StepDistribution build_kernel(const KernelSpec& spec, const Box& box,
                              double tail_mass_cap = kDefaultTailMassCap);

// Wraps given weights as a step distribution: checks D(0) = 0, D >= 0, mass 1
// (after renormalization) and fills in the spectrum.
StepDistribution from_weights(const KernelSpec& spec, const Field& weights);

// Integral-comparison bound on the profile mass outside the fundamental domain.
double tail_mass_bound(const KernelSpec& spec, Index M);

struct AssumptionReport {
  double K_lb_hat = 0.0;
  double K_ub_hat = 0.0;
  double Delta_hat = 0.0;
  double max_imag = 0.0;
  bool pass = false;
};

AssumptionReport check_assumption(const StepDistribution& D);

struct IsingTransform {
  double p = 0.0;
  StepDistribution D;
  // max_x |D(x)/J(x) * sum J - 1| over the support of J
  double shape_deviation = 0.0;
  // |p / (beta sum J) - 1|
  double activity_deviation = 0.0;
};

IsingTransform ising_transform(double beta, const StepDistribution& J);

}  // namespace lrlab
