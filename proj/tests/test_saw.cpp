#include "lrlab/saw.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace lrlab;

namespace {

StepDistribution desk_kernel(Index M = 24) {
  return build_kernel({1, 0.4, 4, Model::SAW}, make_box(1, M), 1.0);
}

// Plain depth-first enumeration over all self-avoiding walks of length <= n_max.
double test_rel(const Field& a, const Field& b) { return sup_norm(a - b) / sup_norm(b); }

Field brute_force(const StepDistribution& D, double p, int n_max) {
  const Box& box = D.box;
  Field G(box);
  std::vector<char> used(box.size(), 0);
  std::function<void(Index, int, double)> walk = [&](Index at, int len, double w) {
    G[at] += w;
    if (len == n_max) return;
    const Point pa = box.point(at);
    for (Index y = 0; y < box.size(); ++y) {
      if (used[y]) continue;
      Point diff = box.point(y);
      for (int a = 0; a < box.dim(); ++a) diff[a] -= pa[a];
      const double s = D.D.at(diff);
      if (s == 0.0) continue;
      used[y] = 1;
      walk(y, len + 1, w * p * s);
      used[y] = 0;
    }
  };
  used[0] = 1;
  walk(0, 0, 1.0);
  return G;
}

}  // namespace

TEST_CASE("one and two step enumerations") {
  StepDistribution D = desk_kernel();
  const double p = 0.3;
  SawEnumeration e1 = enumerate_saw(D, p, 1);
  CHECK(sup_norm(e1.G - (delta(D.box) + p * D.D)) < 1e-15);

  SawEnumeration e2 = enumerate_saw(D, p, 2);
  Field DD = convolve_direct(D.D, D.D);
  Field expect = delta(D.box) + p * D.D + (p * p) * DD;
  expect[0] = 1.0;
  CHECK(sup_norm(e2.G - expect) < 1e-15);
}

TEST_CASE("subset dynamic program matches brute force") {
  for (auto [d, M, n] : {std::tuple{1, Index(8), 6}, {1, 10, 5}, {2, 6, 4}}) {
    StepDistribution D = build_kernel({d, 0.4, 1, Model::SAW}, make_box(d, M), 1.0);
    SawEnumeration e = enumerate_saw(D, 0.45, n);
    CHECK(test_rel(e.G, brute_force(D, 0.45, n)) < 1e-13);
  }
}

TEST_CASE("complete enumeration is flagged") {
  StepDistribution D = build_kernel({1, 0.4, 1, Model::SAW}, make_box(1, 8), 1.0);
  SawEnumeration e = enumerate_saw(D, 1.0, 7);
  CHECK(e.complete);
  CHECK(e.truncation_bound == 0.0);
  CHECK(sup_norm(e.G - brute_force(D, 1.0, 7)) < 1e-13);
  CHECK(sup_norm(enumerate_saw(D, 1.0, 12).G - e.G) == 0.0);
  CHECK_THROWS_AS(enumerate_saw(D, 1.0, 5), SawError);
}

TEST_CASE("domination by the random walk") {
  StepDistribution D = desk_kernel();
  const double p = 0.3;
  SawEnumeration e = enumerate_saw(D, p, 8);
  SawOptions rw;
  rw.self_avoiding = false;
  SawEnumeration c = enumerate_saw(D, p, 8, rw);
  CHECK(e.G[0] == 1.0);
  for (Index i = 0; i < D.box.size(); ++i) CHECK(e.G[i] <= c.G[i] + 1e-15);
  CHECK(sum(e.G) <= 1.0 / (1.0 - p) + e.truncation_bound);
}

TEST_CASE("order-p exactness") {
  StepDistribution D = desk_kernel();
  auto slope = [&](double p) {
    SawEnumeration e = enumerate_saw(D, p, 4);
    return Field(D.box, (e.G - delta(D.box)).values() / p);
  };
  Field rich = 2.0 * slope(1e-3) - slope(2e-3);
  CHECK(sup_norm(rich - D.D) <= 1e-6);
}

TEST_CASE("pi extraction from a pure random walk") {
  StepDistribution D = desk_kernel();
  SawOptions rw;
  rw.self_avoiding = false;
  SawEnumeration c = enumerate_saw(D, 0.3, 40, rw);
  PiExtraction x = extract_pi(c);
  CHECK(sup_norm(x.Pi) <= 1e-10);
  CHECK(x.residual <= 1e-10);
}

TEST_CASE("pi extraction residual and low-order coefficients") {
  StepDistribution D = desk_kernel();
  const double dd0 = convolve_direct(D.D, D.D)[0];
  auto pi_at = [&](double p) { return extract_pi(enumerate_saw(D, p, 6)); };
  PiExtraction a = pi_at(0.05), b = pi_at(0.1), c = pi_at(0.2);
  CHECK(a.residual <= 1e-10);
  CHECK(symmetry_defect(a.Pi) == 0.0);
  const double ca = a.Pi[0] / (0.05 * 0.05), cb = b.Pi[0] / (0.1 * 0.1);
  const double rich = 2.0 * ca - cb;
  MESSAGE("p^2 coefficient " << rich << " vs -(D*D)(0) = " << -dd0);
  CHECK(std::abs(rich / -dd0 - 1.0) <= 0.01);

  auto off = [](const Field& Pi) {
    double m = 0;
    for (Index i = 1; i < Pi.size(); ++i) m = std::max(m, std::abs(Pi[i]));
    return m;
  };
  const double ka = off(a.Pi) / std::pow(0.05, 3), kb = off(b.Pi) / std::pow(0.1, 3),
               kc = off(c.Pi) / std::pow(0.2, 3);
  MESSAGE("off-origin |Pi| / p^3: " << ka << " " << kb << " " << kc);
  CHECK(kb / ka == doctest::Approx(1.0).epsilon(0.3));
  CHECK(kc / ka == doctest::Approx(1.0).epsilon(0.6));
}

TEST_CASE("pi decay constants") {
  KernelSpec s{1, 0.4, 4, Model::SAW};
  PiDecayReport z = check_pi_decay(Field(make_box(1, 24)), s);
  CHECK(z.sup_constant == 0.0);
  CHECK(z.sum_constant == 0.0);

  StepDistribution D = desk_kernel();
  PiDecayReport r8 = check_pi_decay(extract_pi(enumerate_saw(D, 0.3, 8)).Pi, s);
  PiExtraction x10 = extract_pi(enumerate_saw(D, 0.3, 10));
  PiDecayReport r10 = check_pi_decay(x10.Pi, s);
  CHECK(std::isfinite(r10.sup_constant));
  CHECK(std::isfinite(r10.sum_constant));
  CHECK(r10.sup_constant == doctest::Approx(r8.sup_constant).epsilon(0.1));
  CHECK(r10.sum_constant == doctest::Approx(r8.sum_constant).epsilon(0.1));
  LaceData l = build_tilde_D(0.3, D, x10.Pi);
  CHECK(l.positivity_margin > 0.0);
}

TEST_CASE("enumeration errors") {
  StepDistribution D = desk_kernel();
  SawOptions tight;
  tight.state_budget = 1000;
  CHECK_THROWS_AS(enumerate_saw(D, 0.3, 8, tight), SawError);
  CHECK_THROWS_AS(enumerate_saw(D, 0.3, 0), SawError);
  StepDistribution big = build_kernel({1, 0.4, 4, Model::SAW}, make_box(1, 128), 1.0);
  CHECK_THROWS_AS(enumerate_saw(big, 0.3, 3), SawError);
}

TEST_CASE("support cut is charged to the budget") {
  StepDistribution D = desk_kernel();
  SawOptions cut;
  cut.support_cut = 0.02;
  SawEnumeration e = enumerate_saw(D, 0.3, 6, cut);
  SawEnumeration f = enumerate_saw(D, 0.3, 6);
  CHECK(e.cut_bound > 0.0);
  CHECK(sup_norm(e.G - f.G) <= e.cut_bound);
}

TEST_CASE("length truncation bound is certified") {
  StepDistribution D = desk_kernel();
  SawOptions rw;
  rw.self_avoiding = false;
  SawEnumeration e = enumerate_saw(D, 0.3, 6, rw);
  SawEnumeration full = enumerate_saw(D, 0.3, 60, rw);
  CHECK(sup_norm(full.G - e.G) <= e.length_bound);
  CHECK(e.length_bound <= 10 * sup_norm(full.G - e.G));
}

TEST_CASE("bootstrap at p = 1 on a completely enumerated box") {
  // On the torus C_1 diverges through the zero mode, so K_C comes from C_1 summed to the
  // same walk length as the complete enumeration; it dominates G_1 term by term.
  for (Index M : {Index(18), Index(20)}) {
    StepDistribution D = desk_kernel(M);
    const int n = static_cast<int>(M) - 1;
    SawEnumeration e = enumerate_saw(D, 1.0, n);
    REQUIRE(e.complete);
    HeatKernelTable t = heat_iterates(D, n);
    Field C = delta(D.box);
    for (const Field& P : t.powers) C = C + P;
    const double K = bootstrap_b(C, D.spec, 1.0, 1.0).b_value;
    BootstrapEvaluation b = bootstrap_b(e.G, D.spec, 1.0, K);
    MESSAGE("M=" << M << " K_C=" << K << " b(1)=" << b.b_value);
    CHECK(b.b_value <= 1.0 + 1e-12);
  }
}
