#include "lrlab/percolation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace lrlab;

namespace {

// Small boxes drop a large share of the alpha = 0.3 tail; mechanics tests relax the cap.
StepDistribution desk_kernel(Index M) {
  return build_kernel({1, 0.3, 4, Model::PERC}, make_box(1, M), M < (Index(1) << 14) ? 1.0 : 0.1);
}

PercConfig config(const StepDistribution& D, double p, std::int64_t trials, std::uint64_t seed = 1) {
  return PercConfig{D.spec, p, D.box, trials, seed, 1};
}

std::vector<Point> targets_1d(Index rmax) {
  std::vector<Point> xs{{0}};
  for (Index r = 1; r <= rmax; r = r < 8 ? r + 1 : r * 5 / 4) {
    xs.push_back({r});
    xs.push_back({-r});
  }
  return xs;
}

}  // namespace

TEST_CASE("p = 0 gives the singleton cluster") {
  StepDistribution D = desk_kernel(1024);
  PercConfig cfg = config(D, 0.0, 10);
  BondTable t = make_bond_table(D, 0.0);
  for (int i = 0; i < 10; ++i) {
    Cluster c = sample_cluster(cfg, t, i);
    CHECK(c.sites == std::vector<Index>{0});
    CHECK(c.open_bonds.empty());
    CHECK_FALSE(c.wrapped);
  }
  TwoPointEstimate e = estimate_two_point(cfg, D, {{0}, {1}});
  CHECK(e.rows[0].ghat == 1.0);
  CHECK(e.rows[1].ghat == 0.0);
}

TEST_CASE("origin degree has mean p") {
  StepDistribution D = desk_kernel(Index(1) << 14);
  for (double p : {0.3, 0.9}) {
    TwoPointEstimate e = estimate_two_point(config(D, p, 100000, 5), D, {{0}});
    MESSAGE("p=" << p << " degree " << e.origin_degree << " +- " << e.origin_degree_stderr);
    CHECK(std::abs(e.origin_degree - p) <= 3.0 * e.origin_degree_stderr);
    CHECK(e.rows[0].ghat == 1.0);
  }
}

TEST_CASE("bond states are replayable and consistent") {
  StepDistribution D = desk_kernel(4096);
  PercConfig cfg = config(D, 0.9, 1, 42);
  BondTable t = make_bond_table(D, 0.9);
  for (int i = 0; i < 50; ++i) {
    Cluster a = sample_cluster(cfg, t, i), b = sample_cluster(cfg, t, i);
    CHECK(a.sites == b.sites);
    CHECK(a.open_bonds == b.open_bonds);
    // every open bond joins two cluster sites
    for (std::uint64_t k : a.open_bonds) {
      CHECK(a.contains(static_cast<Index>(k & 0xffffffffULL)));
      CHECK(a.contains(static_cast<Index>(k >> 32)));
    }
  }
  CHECK(bond_uniform(3, 7, 10, 20) == bond_uniform(3, 7, 20, 10));
  CHECK(bond_uniform(3, 7, 10, 20) != bond_uniform(3, 8, 10, 20));
  CHECK(bond_key(5, 9) == bond_key(9, 5));
}

TEST_CASE("bond table blocks stay within a factor of two") {
  StepDistribution D = desk_kernel(4096);
  BondTable t = make_bond_table(D, 0.7);
  REQUIRE(t.block.back() == t.prob.size());
  for (std::size_t b = 0; b + 1 < t.block.size(); ++b) {
    for (std::size_t j = t.block[b]; j < t.block[b + 1]; ++j) {
      CHECK(t.prob[j] <= t.block_max[b]);
      CHECK(t.prob[j] >= 0.5 * t.block_max[b]);
    }
  }
  double total = 0;
  for (double q : t.prob) total += q;
  CHECK(total == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("single-bond lower bound and symmetry") {
  StepDistribution D = desk_kernel(Index(1) << 14);
  const double p = 0.8;
  TwoPointEstimate e = estimate_two_point(config(D, p, 200000, 9), D, targets_1d(2048));
  for (const TwoPointRow& r : e.rows) {
    const double pd = p * D.D.at(r.x);
    CHECK_MESSAGE(r.ghat >= pd - 3.0 * r.stderr, r.x[0]);
    CHECK(r.ghat >= 0.0);
    CHECK(r.ghat <= 1.0);
  }
  for (std::size_t i = 1; i + 1 < e.rows.size(); i += 2) {
    const TwoPointRow &a = e.rows[i], &b = e.rows[i + 1];
    REQUIRE(a.x[0] == -b.x[0]);
    CHECK_MESSAGE(std::abs(a.ghat - b.ghat) <= 3.0 * (a.stderr + b.stderr), a.x[0]);
  }
  for (const RadialBin& b : e.bins) CHECK(b.ghat >= b.pD_mean - 3.0 * b.stderr);
}

TEST_CASE("first-order agreement with pD at small p") {
  StepDistribution D = desk_kernel(Index(1) << 14);
  const double p = 0.1;
  TwoPointEstimate e = estimate_two_point(config(D, p, 400000, 13), D, {{0}});
  int checked = 0;
  for (const RadialBin& b : e.bins) {
    if (b.r_lo < 32) continue;
    const double ratio = b.ghat / b.pD_mean, err = 3.0 * b.stderr / b.pD_mean;
    CHECK_MESSAGE(ratio >= 1.0 - err, b.r_mean);
    // correction of order p: bounded by a few times p
    CHECK_MESSAGE(ratio - 1.0 <= 5.0 * p + err, b.r_mean << " ratio " << ratio);
    ++checked;
  }
  CHECK(checked >= 10);
}

TEST_CASE("monotone coupling with shared edge uniforms") {
  StepDistribution D = desk_kernel(512);
  for (int seed = 0; seed < 100; ++seed) {
    Cluster lo = sample_cluster_reference(config(D, 0.5, 1, seed), D, 0);
    Cluster hi = sample_cluster_reference(config(D, 1.0, 1, seed), D, 0);
    std::vector<Index> a = lo.sites, b = hi.sites;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK_MESSAGE(std::includes(b.begin(), b.end(), a.begin(), a.end()), seed);
  }
}

TEST_CASE("reference and fast samplers agree in distribution") {
  StepDistribution D = desk_kernel(512);
  const double p = 0.6;
  const int n = 20000;
  BondTable t = make_bond_table(D, p);
  double s_fast = 0, s_ref = 0, q_fast = 0, q_ref = 0;
  for (int i = 0; i < n; ++i) {
    const double a = static_cast<double>(sample_cluster(config(D, p, 1, 3), t, i).sites.size());
    const double b = static_cast<double>(sample_cluster_reference(config(D, p, 1, 4), D, i).sites.size());
    s_fast += a;
    q_fast += a * a;
    s_ref += b;
    q_ref += b * b;
  }
  const double mf = s_fast / n, mr = s_ref / n;
  const double se = std::sqrt((q_fast / n - mf * mf) / n + (q_ref / n - mr * mr) / n);
  MESSAGE("mean size fast " << mf << " reference " << mr << " se " << se);
  CHECK(std::abs(mf - mr) <= 4.0 * se);
}

TEST_CASE("doubling trials halves the variance") {
  StepDistribution D = desk_kernel(Index(1) << 14);
  TwoPointEstimate a = estimate_two_point(config(D, 0.6, 100000, 21), D, {{0}});
  TwoPointEstimate b = estimate_two_point(config(D, 0.6, 200000, 22), D, {{0}});
  double ratio_sum = 0;
  int n = 0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    ratio_sum += (a.bins[i].stderr * a.bins[i].stderr) / (b.bins[i].stderr * b.bins[i].stderr);
    ++n;
  }
  MESSAGE("mean stderr^2 ratio " << ratio_sum / n);
  CHECK(ratio_sum / n == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("threads do not change the estimate") {
  StepDistribution D = desk_kernel(4096);
  PercConfig one = config(D, 0.9, 4000, 77);
  PercConfig four = one;
  four.threads = 4;
  TwoPointEstimate a = estimate_two_point(one, D, targets_1d(256));
  TwoPointEstimate b = estimate_two_point(four, D, targets_1d(256));
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].ghat == b.rows[i].ghat);
  CHECK(a.wrap_flagged == b.wrap_flagged);
  CHECK(a.mean_cluster_size == b.mean_cluster_size);
}

TEST_CASE("estimate and fit errors") {
  StepDistribution D = desk_kernel(4096);
  CHECK_THROWS_AS(estimate_two_point(config(D, 0.5, 0), D, {{0}}), PercError);
  CHECK_THROWS_AS(estimate_two_point(config(D, -0.1, 10), D, {{0}}), PercError);
  CHECK_THROWS_AS(estimate_two_point(config(D, 0.5, 10), D, {{1000}}), PercError);
  const double dmax = D.D.values().maxCoeff();
  CHECK_THROWS_AS(estimate_two_point(config(D, 1.01 / dmax, 10), D, {{0}}), PercError);

  TwoPointEstimate e = estimate_two_point(config(D, 0.5, 1000), D, {{0}});
  CHECK_THROWS_AS(crossover_fit({e, e}, 32), PercError);
  TwoPointEstimate empty = e;
  empty.trials = 0;
  CHECK_THROWS_AS(crossover_fit({e, e, empty}, 32), PercError);
  // the window [400, M/8] is too short to fit
  CHECK_THROWS_AS(crossover_fit({e, e, e}, 400), PercError);
}

TEST_CASE("crossover fit on a reduced desk run") {
  StepDistribution D = desk_kernel(Index(1) << 14);
  std::vector<TwoPointEstimate> es;
  for (double p : {0.3, 0.6, 0.9})
    es.push_back(estimate_two_point(config(D, p, 100000, 31), D, {{0}}));
  PercFit f = crossover_fit(es, 32);
  REQUIRE(f.rows.size() == 3);
  for (const PercFitRow& r : f.rows) {
    CHECK(r.near_fit.slope < 0.0);
    CHECK(r.far_fit.slope < 0.0);
    CHECK(r.far_amplitude > 0.0);
  }
  // amplitudes grow towards p_c
  CHECK(f.rows[0].far_amplitude < f.rows[1].far_amplitude);
  CHECK(f.rows[1].far_amplitude < f.rows[2].far_amplitude);
  MESSAGE("p_c estimate " << f.p_c << " +- " << f.p_c_err);
  CHECK(f.p_c > 0.9);
}
