#pragma once

#include "lrlab/kernel.hpp"
#include "lrlab/lace.hpp"
#include "lrlab/lattice.hpp"

#include <cstdint>

namespace lrlab {

struct SawError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SawOptions {
  double support_cut = 0.0;
  bool self_avoiding = true;
  // Cap on stored (set, endpoint) weights across two consecutive layers.
  std::int64_t state_budget = 100'000'000;
};

struct SawEnumeration {
  KernelSpec spec;
  Field D;
  double p = 0.0;
  int n_max = 0;
  Field G;
  // Certified sup-norm bound on everything the enumeration leaves out.
  double truncation_bound = 0.0;
  double length_bound = 0.0;
  double cut_bound = 0.0;
  // True when n_max reaches the number of non-origin sites: every self-avoiding walk on the box is counted.
  bool complete = false;
  bool self_avoiding = true;
  std::int64_t states = 0;
};

// Self-avoiding walks on the periodic box, weighted by prod p D(step).
// The box may hold at most 64 sites.
SawEnumeration enumerate_saw(const StepDistribution& D, double p, int n_max, const SawOptions& opt = {});

// sum_{n > n_max} p^n ||D^{*n}||_inf
double length_truncation_bound(const StepDistribution& D, double p, int n_max);

struct PiExtraction {
  Field Pi;
  // sup |G - delta - pD*G - Pi*G|
  double residual = 0.0;
  double min_abs_Ghat = 0.0;
};

// Pi^ = 1 - p D^ - 1/G^
PiExtraction extract_pi(const SawEnumeration& E);

PiDecayReport check_pi_decay(const Field& Pi, const KernelSpec& spec);

}  // namespace lrlab
