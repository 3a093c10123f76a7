#pragma once

#include "lrlab/greens.hpp"
#include "lrlab/kernel.hpp"
#include "lrlab/lattice.hpp"

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

namespace lrlab {

struct PercError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PercConfig {
  KernelSpec spec;
  double p = 0.0;
  Box box;
  std::int64_t trials = 0;
  std::uint64_t rng_seed = 0;
  int threads = 1;

  // p * max D <= 1 and trials > 0.
  void validate(const StepDistribution& D) const;
};

struct Cluster {
  std::vector<Index> sites;
  // Open bonds found during exploration, keyed by canonical unordered pair.
  std::unordered_set<std::uint64_t> open_bonds;
  // Some exploration path left the fundamental domain in lifted coordinates.
  bool wrapped = false;
  int origin_degree = 0;

  bool contains(Index site) const;
};

std::uint64_t bond_key(Index a, Index b);

// Offsets sorted by decreasing D, grouped into blocks whose D values stay within a factor 2.
struct BondTable {
  std::vector<Index> offset;       // box index of the offset
  std::vector<Index> coords;       // d coordinates per offset
  std::vector<double> prob;        // p D(offset)
  std::vector<std::size_t> block;  // block start positions, with a final sentinel
  std::vector<double> block_max;   // p D_max per block
  int d = 1;
};

BondTable make_bond_table(const StepDistribution& D, double p);

// Breadth-first cluster of the origin. Bonds are decided once, at the first explored
// endpoint, by geometric skipping with rejection; randomness is a counter-based stream
// keyed by (seed, trial, site, block).
Cluster sample_cluster(const PercConfig& cfg, const BondTable& table, std::int64_t trial_index);

// Reference sampler: bond {x,y} is open iff U(seed, trial, {x,y}) < p D(x-y), with U a
// hash of the unordered pair. Costs O(M^d) per explored site; exact monotone coupling in p.
Cluster sample_cluster_reference(const PercConfig& cfg, const StepDistribution& D, std::int64_t trial_index);

double bond_uniform(std::uint64_t seed, std::int64_t trial, Index a, Index b);

struct TwoPointRow {
  Point x;
  double x_norm = 0.0;
  double ghat = 0.0;
  double stderr = 0.0;
  std::int64_t trials = 0;
};

struct RadialBin {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double r_mean = 0.0;
  std::int64_t sites = 0;
  // Average of P(0 <-> x) over sites in the bin, with stderr from per-trial counts.
  double ghat = 0.0;
  double stderr = 0.0;
  // mean over sites in the bin of p D(x)
  double pD_mean = 0.0;
};

struct TwoPointEstimate {
  double p = 0.0;
  KernelSpec spec;
  std::uint64_t seed = 0;
  std::int64_t trials = 0;
  std::int64_t wrap_flagged = 0;
  std::vector<TwoPointRow> rows;
  std::vector<RadialBin> bins;
  double mean_cluster_size = 0.0;
  // mean number of open bonds at the origin (all trials)
  double origin_degree = 0.0;
  double origin_degree_stderr = 0.0;
};

struct EstimateOptions {
  // Geometric radial bins from 1 to M/8 with this ratio; 0 disables binning.
  double bin_ratio = 1.25;
  std::function<void(std::int64_t done, std::int64_t total)> progress;
};

TwoPointEstimate estimate_two_point(const PercConfig& cfg, const StepDistribution& D,
                                    const std::vector<Point>& targets, const EstimateOptions& opt = {});

struct RegimeFit {
  double slope = 0.0;
  double slope_err = 0.0;
  int points = 0;
};

struct PercFitRow {
  double p = 0.0;
  double x_switch = 0.0;
  RegimeFit near_fit;
  RegimeFit far_fit;
  // mean of ghat |x|^{d+alpha} over the far window
  double far_amplitude = 0.0;
  double far_amplitude_err = 0.0;
};

struct PercFit {
  std::vector<PercFitRow> rows;
  double p_c = 0.0;
  double p_c_err = 0.0;
  // slope and intercept of amplitude^{-1/2} against p
  double line_slope = 0.0;
  double line_intercept = 0.0;
};

// Broken power-law fit per p (breakpoint by grid search over bin edges), then p_c from
// the zero of amplitude^{-1/2}, linear in p.
PercFit crossover_fit(const std::vector<TwoPointEstimate>& estimates, double window_lo);

}  // namespace lrlab
