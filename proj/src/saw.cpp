#include "lrlab/saw.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <vector>

namespace lrlab {

namespace {

using Mask = std::uint64_t;

struct Binomial {
  std::array<std::array<std::uint64_t, 65>, 65> c{};
  Binomial() {
    for (int n = 0; n <= 64; ++n) {
      c[n][0] = 1;
      for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
    }
  }
  std::uint64_t operator()(int n, int k) const { return (k < 0 || k > n) ? 0 : c[n][k]; }
};

const Binomial& binom() {
  static const Binomial b;
  return b;
}

// Colex rank of a bit set: sum_i C(pos_i, i) with i counted from 1.
std::uint64_t rank_of(Mask m) {
  std::uint64_t r = 0;
  int i = 1;
  while (m) {
    const int pos = std::countr_zero(m);
    r += binom()(pos, i++);
    m &= m - 1;
  }
  return r;
}

Mask next_combination(Mask x) {
  const Mask c = x & (~x + 1);
  const Mask r = x + c;
  return (((r ^ x) >> 2) / c) | r;
}

// Sites are box indices; non-origin site s carries bit s-1.
class SubsetDP {
 public:
  SubsetDP(const Box& box, const std::vector<std::vector<double>>& w, int n_max)
      : box_(box), w_(w), N_(static_cast<int>(box.size()) - 1), n_max_(n_max) {}

  // Returns sum over walks with first step in `seeds` of their weight at the endpoint.
  Field run(const std::vector<Index>& seeds) {
    Field acc(box_);
    const Binomial& C = binom();
    std::vector<double> cur(C(N_, 1));
    for (Index s : seeds) cur[s - 1] = w_[0][s];
    for (int m = 1; m <= n_max_; ++m) {
      const std::uint64_t sets = C(N_, m);
      // collect walks of length m
      {
        Mask mask = (Mask(1) << m) - 1;
        for (std::uint64_t r = 0; r < sets; ++r, mask = next_combination(mask)) {
          Mask it = mask;
          for (int j = 0; j < m; ++j, it &= it - 1) {
            const double W = cur[r * m + j];
            if (W != 0.0) acc[std::countr_zero(it) + 1] += W;
          }
        }
      }
      if (m == n_max_ || m == N_) break;
      std::vector<double> next(C(N_, m + 1) * (m + 1), 0.0);
      std::vector<int> ends(m);
      std::vector<double> Ws(m);
      Mask mask = (Mask(1) << m) - 1;
      for (std::uint64_t r = 0; r < sets; ++r, mask = next_combination(mask)) {
        int live = 0;
        Mask it = mask;
        for (int j = 0; j < m; ++j, it &= it - 1) {
          const double W = cur[r * m + j];
          if (W == 0.0) continue;
          ends[live] = std::countr_zero(it) + 1;
          Ws[live] = W;
          ++live;
        }
        if (live == 0) continue;
        for (int b = 0; b < N_; ++b) {
          const Mask bit = Mask(1) << b;
          if (mask & bit) continue;
          const Index y = b + 1;
          double a = 0.0;
          for (int j = 0; j < live; ++j) a += Ws[j] * w_[ends[j]][y];
          if (a == 0.0) continue;
          const Mask grown = mask | bit;
          const int pos = std::popcount(grown & (bit - 1));
          next[rank_of(grown) * (m + 1) + pos] += a;
        }
      }
      cur.swap(next);
    }
    return acc;
  }

 private:
  const Box& box_;
  const std::vector<std::vector<double>>& w_;
  int N_;
  int n_max_;
};

Point mirror_first_axis(Point x) {
  x[0] = -x[0];
  return x;
}

}  // namespace

double length_truncation_bound(const StepDistribution& D, double p, int n_max) {
  if (!(p < 1.0)) throw SawError("length truncation bound needs p < 1");
  constexpr int kExtra = 256;
  const Eigen::ArrayXd dh = D.dhat_real();
  Eigen::ArrayXd power = Eigen::ArrayXd::Ones(dh.size());
  double total = 0.0;
  double last_sup = 1.0;
  double pn = 1.0;
  for (int n = 1; n <= n_max + kExtra; ++n) {
    power *= dh;
    pn *= p;
    if (n <= n_max) continue;
    last_sup = sup_norm(inverse_fourier_real(Spectrum(D.box, power.cast<std::complex<double>>())));
    total += pn * last_sup;
  }
  // ||D^{*n}||_inf is nonincreasing in n, so the rest is geometric.
  total += last_sup * pn * p / (1.0 - p);
  return total;
}

SawEnumeration enumerate_saw(const StepDistribution& D, double p, int n_max, const SawOptions& opt) {
  const Box& box = D.box;
  if (n_max < 1) throw SawError("n_max must be >= 1");
  if (!(p >= 0.0)) throw SawError("p must be >= 0");
  SawEnumeration E;
  E.spec = D.spec;
  E.D = D.D;
  E.p = p;
  E.n_max = n_max;
  E.self_avoiding = opt.self_avoiding;

  Field cutD = D.D;
  double cut_mass = 0.0;
  for (Index i = 1; i < box.size(); ++i)
    if (D.D[i] < opt.support_cut) {
      cut_mass += D.D[i];
      cutD[i] = 0.0;
    }
  double npn = 0.0, pn = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    pn *= p;
    npn += n * pn;
  }
  E.cut_bound = cut_mass * npn;

  if (!opt.self_avoiding) {
    const Eigen::ArrayXd dh = fourier(cutD).values().real();
    Eigen::ArrayXd term = Eigen::ArrayXd::Ones(dh.size()), acc = term;
    for (int n = 1; n <= n_max; ++n) {
      term *= p * dh;
      acc += term;
    }
    E.G = inverse_fourier_real(Spectrum(box, acc.cast<std::complex<double>>(), true));
    E.length_bound = length_truncation_bound(D, p, n_max);
    E.truncation_bound = E.length_bound + E.cut_bound;
    return E;
  }

  if (box.size() > 64) throw SawError("self-avoiding enumeration supports at most 64 sites");
  const int N = static_cast<int>(box.size()) - 1;
  E.complete = n_max >= N;
  const int depth = std::min(n_max, N);
  std::int64_t peak = 0;
  for (int m = 1; m <= depth; ++m) {
    const auto a = static_cast<std::int64_t>(binom()(N, m) * m);
    const auto b = m < depth ? static_cast<std::int64_t>(binom()(N, m + 1) * (m + 1)) : 0;
    peak = std::max(peak, a + b);
    E.states += a;
  }
  if (peak > opt.state_budget)
    throw SawError("projected enumeration state count " + std::to_string(peak) + " exceeds budget " +
                   std::to_string(opt.state_budget));
  if (!E.complete && !(p < 1.0)) throw SawError("truncated enumeration requires p < 1");

  const Index n = box.size();
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (Index e = 0; e < n; ++e) {
    const Point pe = box.point(e);
    for (Index y = 1; y < n; ++y) {
      if (y == e) continue;
      Point diff = box.point(y);
      for (int a = 0; a < box.dim(); ++a) diff[a] -= pe[a];
      w[e][y] = p * cutD[box.index(diff)];
    }
  }
  // Split by the first step: 0 < x_1 < M/2 (class A, mirrored) or x_1 in {0, M/2} (class B).
  const Index half = box.side() / 2;
  std::vector<Index> seedA, seedB;
  for (Index y = 1; y < n; ++y) {
    const Index c = box.coord(y, 0);
    if (c > 0 && c < half) seedA.push_back(y);
    else if (c == 0 || c == half) seedB.push_back(y);
  }
  SubsetDP dp(box, w, depth);
  const Field A = dp.run(seedA);
  const Field B = dp.run(seedB);
  Field G = delta(box) + B;
  for (Index i = 0; i < n; ++i) {
    G[i] += A[i];
    G[box.index(mirror_first_axis(box.point(i)))] += A[i];
  }
  G.set_symmetric(true);
  E.G = G;
  E.length_bound = E.complete ? 0.0 : length_truncation_bound(D, p, n_max);
  E.truncation_bound = E.length_bound + E.cut_bound;
  return E;
}

PiExtraction extract_pi(const SawEnumeration& E) {
  const Box& box = E.G.box();
  const Spectrum Gh = fourier(E.G);
  const Spectrum Dh = fourier(E.D);
  PiExtraction out;
  out.min_abs_Ghat = Gh.values().abs().minCoeff();
  if (!(out.min_abs_Ghat > 1e-12)) throw SawError("G^ vanishes on the grid; Pi cannot be extracted");
  Spectrum Pih(box, 1.0 - E.p * Dh.values() - 1.0 / Gh.values(), true);
  out.Pi = symmetrize(inverse_fourier_real(Pih));
  const Field pD = E.p * E.D;
  const bool direct = box.size() <= (Index(1) << 12);
  const Field a = direct ? convolve_direct(pD, E.G) : convolve(pD, E.G);
  const Field b = direct ? convolve_direct(out.Pi, E.G) : convolve(out.Pi, E.G);
  out.residual = sup_norm(E.G - delta(box) - a - b);
  return out;
}

PiDecayReport check_pi_decay(const Field& Pi, const KernelSpec& spec) {
  const Box& box = Pi.box();
  const int l = ell(spec.model);
  const double Ld = std::pow(spec.L, spec.d);
  PiDecayReport rep;
  double s = 0.0;
  for (Index i = 1; i < box.size(); ++i) {
    const double nxl = nnnorm(box.norm(i), spec.L) / spec.L;
    const double env = std::pow(Ld * std::pow(nxl, spec.d - spec.alpha2()), l);
    rep.sup_constant = std::max(rep.sup_constant, std::abs(Pi[i]) * env);
    s += std::abs(Pi[i]);
  }
  rep.sum_constant = s * std::pow(spec.L, (l - 1) * spec.d);
  return rep;
}

}  // namespace lrlab
