#include "lrlab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace lrlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

class Stream {
 public:
  explicit Stream(std::uint64_t key) : s_(key) {}
  // Uniform on (0, 1].
  double uniform() {
    s_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>((z >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t s_;
};

Index wrap(Index c, Index M) {
  Index r = c % M;
  return r < 0 ? r + M : r;
}

bool outside(Index c, Index M) { return c <= -M / 2 || c > M / 2; }

// Shared BFS bookkeeping for both samplers.
class Explorer {
 public:
  explicit Explorer(const Box& box)
      : box_(box), d_(box.dim()), state_(box.size(), 0), pos_(box.size(), 0) {}

  void reset() {
    for (Index s : cluster_.sites) state_[s] = 0;
    cluster_ = Cluster{};
    lift_.clear();
  }

  void start() {
    cluster_.sites.push_back(0);
    pos_[0] = 0;
    lift_.assign(d_, 0);
    state_[0] = 1;
  }

  // Site reached from queue entry q along an offset with coordinates o.
  void reach(std::size_t q, const Index* o) {
    const Index M = box_.side();
    Index v = 0;
    Index stride = 1;
    tmp_.resize(d_);
    bool out = false;
    for (int a = d_ - 1; a >= 0; --a) {
      tmp_[a] = lift_[q * d_ + a] + o[a];
      out |= outside(tmp_[a], M);
      v += wrap(tmp_[a], M) * stride;
      stride *= M;
    }
    const Index u = cluster_.sites[q];
    if (state_[v] == 2) return;
    cluster_.open_bonds.insert(bond_key(u, v));
    if (q == 0) ++cluster_.origin_degree;
    if (state_[v] == 0) {
      state_[v] = 1;
      pos_[v] = cluster_.sites.size();
      cluster_.sites.push_back(v);
      lift_.insert(lift_.end(), tmp_.begin(), tmp_.end());
      cluster_.wrapped |= out;
    } else {
      // closing a cycle through the periodic seam also counts as wrapping
      const std::size_t j = pos_[v];
      for (int a = 0; a < d_; ++a)
        if (lift_[j * d_ + a] != tmp_[a]) cluster_.wrapped = true;
    }
  }

  bool processed(Index v) const { return state_[v] == 2; }
  void mark_processed(std::size_t q) { state_[cluster_.sites[q]] = 2; }
  std::size_t size() const { return cluster_.sites.size(); }
  Index site(std::size_t q) const { return cluster_.sites[q]; }
  const Index* lift(std::size_t q) const { return &lift_[q * d_]; }
  Cluster take() { return cluster_; }
  const Cluster& cluster() const { return cluster_; }

 private:
  const Box& box_;
  int d_;
  std::vector<std::uint8_t> state_;
  std::vector<std::size_t> pos_;
  Cluster cluster_;
  std::vector<Index> lift_;
  std::vector<Index> tmp_;
};

void explore(const BondTable& t, std::uint64_t seed, std::int64_t trial, Explorer& ex) {
  ex.start();
  const std::uint64_t trial_key = mix(mix(0x5eedULL, seed), static_cast<std::uint64_t>(trial));
  const std::size_t nblocks = t.block_max.size();
  for (std::size_t q = 0; q < ex.size(); ++q) {
    ex.mark_processed(q);
    const std::uint64_t site_key = mix(trial_key, static_cast<std::uint64_t>(ex.site(q)));
    for (std::size_t b = 0; b < nblocks; ++b) {
      const double qb = t.block_max[b];
      if (qb <= 0.0) continue;
      Stream rng(mix(site_key, b));
      const double lq = std::log1p(-std::min(qb, 1.0));
      const std::size_t end = t.block[b + 1];
      std::size_t j = t.block[b];
      while (true) {
        if (lq > -std::numeric_limits<double>::infinity()) {
          const double skip = std::floor(std::log(rng.uniform()) / lq);
          if (skip >= static_cast<double>(end - j)) break;
          j += static_cast<std::size_t>(skip);
        }
        if (j >= end) break;
        if (rng.uniform() * qb <= t.prob[j]) ex.reach(q, &t.coords[j * t.d]);
        ++j;
      }
    }
  }
}

}  // namespace

bool Cluster::contains(Index site) const {
  return std::find(sites.begin(), sites.end(), site) != sites.end();
}

std::uint64_t bond_key(Index a, Index b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

double bond_uniform(std::uint64_t seed, std::int64_t trial, Index a, Index b) {
  const std::uint64_t h = mix(mix(mix(0xb0dULL, seed), static_cast<std::uint64_t>(trial)), bond_key(a, b));
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

void PercConfig::validate(const StepDistribution& D) const {
  if (!(p >= 0.0)) throw PercError("p must be >= 0");
  if (trials <= 0) throw PercError("trials must be positive");
  if (box != D.box) throw PercError("config box differs from the kernel box");
  if (box.size() > (Index(1) << 32)) throw PercError("box too large for 32-bit bond keys");
  const double dmax = D.D.values().maxCoeff();
  if (p * dmax > 1.0) throw PercError("p * max D exceeds 1");
  if (threads < 1) throw PercError("threads must be >= 1");
}

BondTable make_bond_table(const StepDistribution& D, double p) {
  const Box& box = D.box;
  BondTable t;
  t.d = box.dim();
  std::vector<Index> order;
  for (Index i = 1; i < box.size(); ++i)
    if (D.D[i] > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return D.D[a] > D.D[b]; });
  for (Index i : order) {
    t.offset.push_back(i);
    for (int a = 0; a < t.d; ++a) t.coords.push_back(box.coord(i, a));
    t.prob.push_back(p * D.D[i]);
  }
  for (std::size_t j = 0; j < t.prob.size(); ++j) {
    if (t.block.empty() || t.prob[j] < 0.5 * t.block_max.back()) {
      t.block.push_back(j);
      t.block_max.push_back(t.prob[j]);
    }
  }
  t.block.push_back(t.prob.size());
  return t;
}

Cluster sample_cluster(const PercConfig& cfg, const BondTable& table, std::int64_t trial_index) {
  Explorer ex(cfg.box);
  explore(table, cfg.rng_seed, trial_index, ex);
  return ex.take();
}

Cluster sample_cluster_reference(const PercConfig& cfg, const StepDistribution& D, std::int64_t trial_index) {
  const Box& box = cfg.box;
  Explorer ex(box);
  ex.start();
  std::vector<Index> coords(box.dim());
  for (std::size_t q = 0; q < ex.size(); ++q) {
    ex.mark_processed(q);
    const Index u = ex.site(q);
    for (Index o = 1; o < box.size(); ++o) {
      const double pr = cfg.p * D.D[o];
      if (pr <= 0.0) continue;
      Index v = 0, stride = 1;
      const Index* lu = ex.lift(q);
      for (int a = box.dim() - 1; a >= 0; --a) {
        coords[a] = box.coord(o, a);
        v += wrap(lu[a] + coords[a], box.side()) * stride;
        stride *= box.side();
      }
      if (ex.processed(v)) continue;
      if (bond_uniform(cfg.rng_seed, trial_index, u, v) < pr) ex.reach(q, coords.data());
    }
  }
  return ex.take();
}

namespace {

struct Accumulator {
  std::vector<std::int64_t> hits;
  std::vector<double> bin_sum, bin_sumsq;
  std::int64_t kept = 0, flagged = 0;
  double size_sum = 0;
  double deg_sum = 0, deg_sumsq = 0;
};

}  // namespace

TwoPointEstimate estimate_two_point(const PercConfig& cfg, const StepDistribution& D,
                                    const std::vector<Point>& targets, const EstimateOptions& opt) {
  cfg.validate(D);
  const Box& box = cfg.box;
  const double rmax = static_cast<double>(box.side()) / 8.0;
  for (const Point& x : targets)
    if (box.norm(box.index(x)) > rmax) throw PercError("target outside |x| <= M/8");

  // Radial bins.
  std::vector<double> edges;
  std::vector<int> bin_of(box.size(), -1);
  if (opt.bin_ratio > 1.0) {
    for (double r = 1.0; r <= rmax * opt.bin_ratio; r *= opt.bin_ratio) edges.push_back(r);
  }
  const int nb = edges.size() > 1 ? static_cast<int>(edges.size()) - 1 : 0;
  std::vector<std::int64_t> bin_sites(nb, 0);
  std::vector<double> bin_r(nb, 0.0), bin_pd(nb, 0.0);
  for (Index i = 1; i < box.size() && nb > 0; ++i) {
    const double r = box.norm(i);
    if (r > rmax) continue;
    const auto it = std::upper_bound(edges.begin(), edges.end(), r);
    const int b = static_cast<int>(it - edges.begin()) - 1;
    if (b < 0 || b >= nb) continue;
    bin_of[i] = b;
    ++bin_sites[b];
    bin_r[b] += r;
    bin_pd[b] += cfg.p * D.D[i];
  }

  const BondTable table = make_bond_table(D, cfg.p);
  const int threads = static_cast<int>(std::min<std::int64_t>(cfg.threads, cfg.trials));
  std::vector<Accumulator> acc(threads);
  auto work = [&](int w) {
    Accumulator& A = acc[w];
    A.hits.assign(box.size(), 0);
    A.bin_sum.assign(nb, 0.0);
    A.bin_sumsq.assign(nb, 0.0);
    std::vector<std::int64_t> local(nb, 0);
    std::vector<int> touched;
    Explorer ex(box);
    const std::int64_t lo = cfg.trials * w / threads, hi = cfg.trials * (w + 1) / threads;
    const std::int64_t tick = std::max<std::int64_t>(1, (hi - lo) / 100);
    for (std::int64_t t = lo; t < hi; ++t) {
      ex.reset();
      explore(table, cfg.rng_seed, t, ex);
      const Cluster& c = ex.cluster();
      A.deg_sum += c.origin_degree;
      A.deg_sumsq += static_cast<double>(c.origin_degree) * c.origin_degree;
      if (c.wrapped) {
        ++A.flagged;
      } else {
        ++A.kept;
        A.size_sum += static_cast<double>(c.sites.size());
        for (Index s : c.sites) {
          ++A.hits[s];
          const int b = bin_of[s];
          if (b >= 0) {
            if (local[b] == 0) touched.push_back(b);
            ++local[b];
          }
        }
        for (int b : touched) {
          const double v = static_cast<double>(local[b]);
          A.bin_sum[b] += v;
          A.bin_sumsq[b] += v * v;
          local[b] = 0;
        }
        touched.clear();
      }
      if (w == 0 && opt.progress && (t - lo + 1) % tick == 0) opt.progress((t - lo + 1) * threads, cfg.trials);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  // Deterministic merge in chunk order.
  Accumulator tot;
  tot.hits.assign(box.size(), 0);
  tot.bin_sum.assign(nb, 0.0);
  tot.bin_sumsq.assign(nb, 0.0);
  for (const Accumulator& A : acc) {
    tot.kept += A.kept;
    tot.flagged += A.flagged;
    tot.size_sum += A.size_sum;
    tot.deg_sum += A.deg_sum;
    tot.deg_sumsq += A.deg_sumsq;
    for (Index i = 0; i < box.size(); ++i) tot.hits[i] += A.hits[i];
    for (int b = 0; b < nb; ++b) {
      tot.bin_sum[b] += A.bin_sum[b];
      tot.bin_sumsq[b] += A.bin_sumsq[b];
    }
  }

  TwoPointEstimate est;
  est.p = cfg.p;
  est.spec = cfg.spec;
  est.seed = cfg.rng_seed;
  est.trials = tot.kept;
  est.wrap_flagged = tot.flagged;
  const double all = static_cast<double>(cfg.trials);
  est.origin_degree = tot.deg_sum / all;
  const double var = std::max(0.0, tot.deg_sumsq / all - est.origin_degree * est.origin_degree);
  est.origin_degree_stderr = std::sqrt(var / all);
  if (tot.kept == 0) return est;
  const double T = static_cast<double>(tot.kept);
  est.mean_cluster_size = tot.size_sum / T;
  for (const Point& x : targets) {
    const Index i = box.index(x);
    TwoPointRow row;
    row.x = x;
    row.x_norm = box.norm(i);
    row.trials = tot.kept;
    row.ghat = i == 0 ? 1.0 : static_cast<double>(tot.hits[i]) / T;
    // Floor at 1/T: with zero hits, 3 stderr is the rule-of-three bound 3/T.
    row.stderr = i == 0 ? 0.0 : std::max(std::sqrt(row.ghat * (1.0 - row.ghat) / T), 1.0 / T);
    est.rows.push_back(row);
  }
  for (int b = 0; b < nb; ++b) {
    if (bin_sites[b] == 0) continue;
    RadialBin bin;
    bin.r_lo = edges[b];
    bin.r_hi = edges[b + 1];
    bin.sites = bin_sites[b];
    bin.r_mean = bin_r[b] / static_cast<double>(bin_sites[b]);
    bin.pD_mean = bin_pd[b] / static_cast<double>(bin_sites[b]);
    const double mean = tot.bin_sum[b] / T;
    const double v = std::max(0.0, tot.bin_sumsq[b] / T - mean * mean);
    bin.ghat = mean / static_cast<double>(bin_sites[b]);
    bin.stderr = std::sqrt(v / T) / static_cast<double>(bin_sites[b]);
    est.bins.push_back(bin);
  }
  return est;
}

namespace {

struct Line {
  double a = 0, b = 0;  // y = a + b x
  double b_err = 0, a_err = 0, cov = 0, chi2 = 0;
  int n = 0;
};

Line wls(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& s) {
  Line L;
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = 1.0 / (s[i] * s[i]);
    S += w;
    Sx += w * x[i];
    Sy += w * y[i];
    Sxx += w * x[i] * x[i];
    Sxy += w * x[i] * y[i];
  }
  L.n = static_cast<int>(x.size());
  const double det = S * Sxx - Sx * Sx;
  if (L.n < 2 || det <= 0) return L;
  L.b = (S * Sxy - Sx * Sy) / det;
  L.a = (Sxx * Sy - Sx * Sxy) / det;
  L.b_err = std::sqrt(S / det);
  L.a_err = std::sqrt(Sxx / det);
  L.cov = -Sx / det;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = (y[i] - L.a - L.b * x[i]) / s[i];
    L.chi2 += e * e;
  }
  return L;
}

}  // namespace

PercFit crossover_fit(const std::vector<TwoPointEstimate>& estimates, double window_lo) {
  if (estimates.size() < 3) throw PercError("crossover fit needs at least 3 values of p");
  PercFit fit;
  std::vector<double> ps, amps, amp_s;
  for (const TwoPointEstimate& e : estimates) {
    if (e.trials == 0) throw PercError("all trials wrap-flagged at p = " + std::to_string(e.p));
    const double expo = e.spec.d + e.spec.alpha;
    std::vector<double> lx, ly, ls, r;
    for (const RadialBin& b : e.bins) {
      if (b.r_mean < window_lo || !(b.ghat > 0.0) || !(b.stderr > 0.0)) continue;
      if (b.stderr / b.ghat > 0.5) continue;
      lx.push_back(std::log(b.r_mean));
      ly.push_back(std::log(b.ghat));
      ls.push_back(b.stderr / b.ghat);
      r.push_back(b.r_mean);
    }
    if (r.size() < 6 || r.back() / r.front() < std::pow(10.0, 1.5))
      throw PercError("insufficient radii for crossover fit at p = " + std::to_string(e.p));
    // Breakpoint search: both sides need at least 3 bins.
    double best = std::numeric_limits<double>::infinity();
    std::size_t split = 3;
    for (std::size_t k = 3; k + 3 <= lx.size(); ++k) {
      std::vector<double> x1(lx.begin(), lx.begin() + k), y1(ly.begin(), ly.begin() + k),
          s1(ls.begin(), ls.begin() + k);
      std::vector<double> x2(lx.begin() + k, lx.end()), y2(ly.begin() + k, ly.end()), s2(ls.begin() + k, ls.end());
      const double c = wls(x1, y1, s1).chi2 + wls(x2, y2, s2).chi2;
      if (c < best) {
        best = c;
        split = k;
      }
    }
    std::vector<double> x1(lx.begin(), lx.begin() + split), y1(ly.begin(), ly.begin() + split),
        s1(ls.begin(), ls.begin() + split);
    std::vector<double> x2(lx.begin() + split, lx.end()), y2(ly.begin() + split, ly.end()),
        s2(ls.begin() + split, ls.end());
    const Line n = wls(x1, y1, s1), f = wls(x2, y2, s2);
    PercFitRow row;
    row.p = e.p;
    row.x_switch = std::sqrt(r[split - 1] * r[split]);
    row.near_fit = {n.b, n.b_err, n.n};
    row.far_fit = {f.b, f.b_err, f.n};
    double sw = 0, sa = 0;
    for (std::size_t i = split; i < r.size(); ++i) {
      const double amp = std::exp(ly[i]) * std::pow(r[i], expo);
      const double s = amp * ls[i];
      sw += 1.0 / (s * s);
      sa += amp / (s * s);
    }
    row.far_amplitude = sa / sw;
    row.far_amplitude_err = 1.0 / std::sqrt(sw);
    fit.rows.push_back(row);
    ps.push_back(e.p);
    amps.push_back(std::pow(row.far_amplitude, -0.5));
    amp_s.push_back(0.5 * std::pow(row.far_amplitude, -1.5) * row.far_amplitude_err);
  }
  const Line line = wls(ps, amps, amp_s);
  fit.line_slope = line.b;
  fit.line_intercept = line.a;
  fit.p_c = -line.a / line.b;
  // delta method for -a/b
  const double ga = -1.0 / line.b, gb = line.a / (line.b * line.b);
  fit.p_c_err = std::sqrt(ga * ga * line.a_err * line.a_err + gb * gb * line.b_err * line.b_err +
                          2 * ga * gb * line.cov);
  return fit;
}

}  // namespace lrlab
