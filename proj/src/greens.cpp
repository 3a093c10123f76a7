#include "lrlab/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrlab {

std::string to_string(Method m) { return m == Method::Series ? "series" : "fourier"; }

namespace {

Spectrum real_spectrum(const Box& box, const Eigen::ArrayXd& re) {
  return Spectrum(box, re.cast<std::complex<double>>(), true);
}

double log_nn(double r, double L) { return std::log(nnnorm(r, L) / L); }

}  // namespace

GreensFunction greens_series(const StepDistribution& D, double mu, double tol) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw GreensError("mu must lie in [0,1]");
  if (!(tol > 0.0)) throw GreensError("tol must be positive");
  const KernelSpec& spec = D.spec;
  const Box& box = D.box;
  GreensFunction S;
  S.spec = spec;
  S.mu = mu;
  S.method = Method::Series;
  if (mu == 0.0) {
    S.values = delta(box);
    return S;
  }
  const Eigen::ArrayXd dh = D.dhat_real();
  if (mu < 1.0) {
    Index N = 0;
    double rem = mu / (1.0 - mu);
    while (rem > tol) {
      ++N;
      rem *= mu;
    }
    Eigen::ArrayXd term = Eigen::ArrayXd::Ones(box.size());
    Eigen::ArrayXd acc = term;
    const Eigen::ArrayXd step = mu * dh;
    for (Index n = 1; n <= N; ++n) {
      term *= step;
      acc += term;
    }
    S.values = inverse_fourier_real(real_spectrum(box, acc));
    S.values.set_symmetric(true);
    S.N_used = N;
    S.remainder_bound = rem;
    return S;
  }
  if (!(static_cast<double>(spec.d) > spec.alpha2()))
    throw GreensError("mu = 1 diverges: requires d > min(alpha, 2)");
  // Oscillating part of the tail: |sum_{n>N} D^{*n}(x) - D^{*n}(x*)| <= 2 M^-d sum_{k!=0} |Dh|^{N+1}/(1-|Dh|).
  Eigen::ArrayXd a = dh.abs();
  a[0] = 0.0;
  if ((a.tail(a.size() - 1) >= 1.0).any())
    throw GreensError("|D^(k)| = 1 at a nonzero grid frequency; the critical series does not converge");
  const double inv_n = 1.0 / static_cast<double>(box.size());
  auto tail = [&](Index N) {
    double s = 0;
    for (Index i = 1; i < a.size(); ++i) s += std::pow(a[i], static_cast<double>(N + 1)) / (1.0 - a[i]);
    return 2.0 * inv_n * s;
  };
  Index hi = 1;
  while (tail(hi) > tol) {
    hi *= 2;
    if (hi > (Index(1) << 40)) throw GreensError("critical series tail bound does not reach tol");
  }
  Index lo = hi / 2;
  while (hi - lo > 1) {
    Index mid = (lo + hi) / 2;
    (tail(mid) > tol ? lo : hi) = mid;
  }
  const Index N = hi;
  Eigen::ArrayXd part(box.size());
  part[0] = 0.0;  // zero mode adds the same constant at every x and cancels after grounding
  for (Index i = 1; i < box.size(); ++i)
    part[i] = (1.0 - std::pow(dh[i], static_cast<double>(N + 1))) / (1.0 - dh[i]);
  S.values = grounded(inverse_fourier_real(real_spectrum(box, part)));
  S.grounded = true;
  S.N_used = N;
  S.remainder_bound = tail(N);
  return S;
}

GreensFunction greens_fourier(const StepDistribution& D, double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) throw GreensError("fourier route requires mu in [0,1)");
  GreensFunction S;
  S.spec = D.spec;
  S.mu = mu;
  S.method = Method::Fourier;
  const Eigen::ArrayXd sh = 1.0 / (1.0 - mu * D.dhat_real());
  S.values = inverse_fourier_real(real_spectrum(D.box, sh));
  S.values.set_symmetric(true);
  return S;
}

Field grounded(const Field& f) {
  const double base = f[f.box().antipode()];
  return Field(f.box(), f.values() - base, f.symmetric());
}

Field grounded_values(const GreensFunction& S) { return S.grounded ? S.values : grounded(S.values); }

double renewal_residual(const GreensFunction& S, const StepDistribution& D) {
  Field r = S.values - delta(D.box) - S.mu * convolve(D.D, S.values);
  return sup_norm(r);
}

double upper_bound_formula(double r, double mu, const KernelSpec& s) {
  const double a = s.alpha2();
  const double nx = nnnorm(r, s.L);
  const double nxl = nx / s.L;
  const double gap = 1.0 - mu;
  if (s.alpha == 2.0) {
    const double lg = std::log(nxl);
    const double base = 1.0 / (std::pow(s.L, 2.0) * std::pow(nx, s.d - 2.0) * lg);
    if (gap <= 0.0) return base;
    return base * std::min(1.0, lg * lg / (std::pow(nxl, 4.0) * gap * gap));
  }
  const double base = 1.0 / (std::pow(s.L, a) * std::pow(nx, s.d - a));
  if (gap <= 0.0) return base;
  return base * std::min(1.0, 1.0 / (std::pow(nxl, 2.0 * a) * gap * gap));
}

BoundReport check_upper_bound(const GreensFunction& S) {
  const Field g = grounded_values(S);
  const Box& box = g.box();
  BoundReport rep;
  rep.mu = S.mu;
  rep.M = box.side();
  Index best = -1;
  double sup = -std::numeric_limits<double>::infinity();
  for (Index i = 1; i < box.size(); ++i) {
    const double ratio = g[i] / upper_bound_formula(box.norm(i), S.mu, S.spec);
    // Ties resolve to the lexicographically smallest point.
    if (ratio > sup || (ratio == sup && box.point(i) < box.point(best))) {
      sup = ratio;
      best = i;
    }
  }
  rep.sup_ratio = sup;
  if (best >= 0) {
    rep.argmax = box.point(best);
    rep.argmax_norm = box.norm(best);
  }
  return rep;
}

double relative_drift(double base, double doubled) { return std::abs(doubled - base) / std::abs(base); }

double HeatKernelTable::max_c_sup() const {
  return c_sup.empty() ? 0.0 : *std::max_element(c_sup.begin(), c_sup.end());
}
double HeatKernelTable::max_c_pt() const {
  return c_pt.empty() ? 0.0 : *std::max_element(c_pt.begin(), c_pt.end());
}

HeatKernelTable heat_iterates(const StepDistribution& D, int n_max, double window, bool keep_powers) {
  if (n_max < 1) throw GreensError("n_max must be >= 1");
  const KernelSpec& s = D.spec;
  const Box& box = D.box;
  HeatKernelTable t;
  t.window = window > 0.0 ? window : static_cast<double>(box.side()) / 8.0;
  const double a = s.alpha2();
  const bool log_variant = s.alpha == 2.0;
  const double Ld = std::pow(s.L, s.d);
  const double La = std::pow(s.L, a);
  std::vector<Index> sites;
  std::vector<double> weight;
  for (Index i = 1; i < box.size(); ++i) {
    const double r = box.norm(i);
    if (r > t.window) continue;
    sites.push_back(i);
    double w = std::pow(nnnorm(r, s.L), s.d + a) / La;
    if (log_variant) w /= log_nn(r, s.L);
    weight.push_back(w);
  }
  const Eigen::ArrayXd dh = D.dhat_real();
  Eigen::ArrayXd power = Eigen::ArrayXd::Ones(box.size());
  for (int n = 1; n <= n_max; ++n) {
    power *= dh;
    Field Dn = n == 1 ? D.D : inverse_fourier_real(real_spectrum(box, power));
    const double sup = sup_norm(Dn);
    if (sup < 1e-300) {
      t.truncated = true;
      t.notice = "all values of D^{*" + std::to_string(n) + "} below 1e-300; table truncated";
      break;
    }
    const double nn = static_cast<double>(n);
    const double growth = log_variant ? std::pow(nn * std::log(M_PI * nn / 2.0), s.d / 2.0)
                                      : std::pow(nn, s.d / a);
    double cpt = 0.0;
    for (std::size_t j = 0; j < sites.size(); ++j) cpt = std::max(cpt, Dn[sites[j]] * weight[j] / nn);
    t.sup_norms.push_back(sup);
    t.c_sup.push_back(sup * Ld * growth);
    t.c_pt.push_back(cpt);
    if (keep_powers) t.powers.push_back(std::move(Dn));
    t.n_computed = n;
  }
  return t;
}

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& weights) {
  SlopeFit f;
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx, ly, lw;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    lw.push_back(w);
  }
  f.points = static_cast<int>(lx.size());
  if (f.points < 2) return f;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sw += lw[i];
    sx += lw[i] * lx[i];
    sy += lw[i] * ly[i];
  }
  const double mx = sx / sw, my = sy / sw;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += lw[i] * (lx[i] - mx) * (lx[i] - mx);
    sxy += lw[i] * (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (f.points > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double e = ly[i] - f.intercept - f.slope * lx[i];
      rss += lw[i] * e * e;
    }
    f.stderr_slope = std::sqrt(rss / (f.points - 2) / sxx);
  }
  return f;
}

CrossoverProfile crossover_profile(const StepDistribution& D, const std::vector<double>& mus,
                                   const std::vector<Point>& xs) {
  const KernelSpec& s = D.spec;
  if (!(s.alpha < 2.0)) throw GreensError("crossover profile requires 0 < alpha < 2");
  if (xs.empty()) throw GreensError("empty list of points");
  if (mus.empty()) throw GreensError("empty list of mu values");
  for (double mu : mus)
    if (!(mu >= 0.0 && mu <= 1.0)) throw GreensError("mu outside [0,1]");
  const Box& box = D.box;
  CrossoverProfile prof;
  prof.window_lo = 8.0 * s.L;
  prof.window_hi = static_cast<double>(box.side()) / 8.0;
  const double a = s.alpha;
  for (double mu : mus) {
    const GreensFunction S = mu == 1.0 ? greens_series(D, 1.0) : greens_fourier(D, mu);
    const Field g = grounded_values(S);
    const double gap = 1.0 - mu;
    const double mlog = mu > 0.0 ? -std::log(mu) : std::numeric_limits<double>::infinity();
    std::vector<double> nx, ny, fx, fy;
    double lower_min = std::numeric_limits<double>::infinity();
    for (const Point& x : xs) {
      const Index i = box.index(x);
      const double r = box.norm(i);
      ProfileRow row;
      row.mu = mu;
      row.x_norm = r;
      row.S = g[i];
      const double nxl = nnnorm(r, s.L) / s.L;
      row.near_bound = 1.0 / (std::pow(s.L, a) * std::pow(nnnorm(r, s.L), s.d - a));
      row.far_bound = gap > 0.0 ? row.near_bound / (std::pow(nxl, 2.0 * a) * gap * gap)
                                : std::numeric_limits<double>::infinity();
      if (r == 0.0) {
        row.lower_bound = 1.0;
      } else {
        const double t = std::pow(r, a) * mlog;
        row.lower_bound = std::pow(r, -(s.d - a)) / (2.0 * M_E) * std::min(1.0, 1.0 / (t * t));
      }
      row.far = std::pow(nxl, a) * gap > 1.0;
      if (row.S > 0.0) lower_min = std::min(lower_min, row.S / row.lower_bound);
      if (r >= prof.window_lo && r <= prof.window_hi) {
        (row.far ? fx : nx).push_back(r);
        (row.far ? fy : ny).push_back(row.S);
      }
      prof.rows.push_back(row);
    }
    prof.mus.push_back(mu);
    prof.near_fit.push_back(loglog_fit(nx, ny));
    prof.far_fit.push_back(loglog_fit(fx, fy));
    prof.crossover_x.push_back(gap > 0.0 ? s.L * 2.0 / M_PI * std::pow(gap, -1.0 / a)
                                         : std::numeric_limits<double>::infinity());
    prof.lower_ratio_min.push_back(lower_min);
  }
  return prof;
}

}  // namespace lrlab
