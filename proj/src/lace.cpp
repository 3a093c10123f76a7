#include "lrlab/lace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lrlab {

NeumannInverse neumann_inverse(const Field& h, double tol, int n_cap) {
  if (!(tol > 0.0)) throw LaceError("tol must be positive");
  const Box& box = h.box();
  const Field e = delta(box) - h;
  NeumannInverse out;
  out.rho = sup_norm(fourier(e));
  if (!(out.rho < 1.0)) {
    std::ostringstream msg;
    msg << "non-contractive input: max_k |1 - h^(k)| = " << out.rho << " >= 1";
    throw LaceError(msg.str());
  }
  Field g = delta(box);
  Field term = delta(box);
  const double stop = tol * (1.0 - out.rho);
  int n = 0;
  while (true) {
    term = convolve(term, e);
    ++n;
    g = g + term;
    const double inc = sup_norm(term);
    if (inc <= stop) {
      // h * g - delta telescopes to -(delta - h)^{*(n+1)}
      out.residual = sup_norm(convolve(term, e));
      if (out.residual <= tol) break;
    }
    if (n >= n_cap) throw LaceError("Neumann series hit n_cap before reaching tol");
  }
  out.terms = n;
  g.set_symmetric(h.symmetric());
  out.inverse = g;
  out.Pi = delta(box) - g;
  return out;
}

Field envelope(const Box& box, double L, double theta, double phi, double psi) {
  Field E(box, true);
  const int d = box.dim();
  const double pref = std::pow(L, -(d + phi));
  // The origin carries only the delta part, so delta * delta has constant exactly 1.
  E[0] = 1.0;
  for (Index i = 1; i < box.size(); ++i) {
    const double nxl = nnnorm(box.norm(i), L) / L;
    E[i] = pref * std::pow(nxl, -(d + theta)) * std::pow(std::log(nxl), -psi);
  }
  return E;
}

ConvBound conv_bound_check(const Field& f1, const Field& f2, double theta, double phi, double psi,
                           const KernelSpec& spec) {
  if (!(theta > 0.0)) throw LaceError("theta must be positive");
  if (f1.box() != f2.box()) throw LaceError("box mismatch");
  const Field E = envelope(f1.box(), spec.L, theta, phi, psi);
  const double slack = 1e-12;
  for (Index i = 0; i < E.size(); ++i)
    if (std::abs(f1[i]) > E[i] * (1 + slack) || std::abs(f2[i]) > E[i] * (1 + slack))
      throw LaceError("input exceeds the envelope at site " + std::to_string(i));
  const Field c = convolve(f1, f2);
  ConvBound out;
  Index best = 0;
  for (Index i = 0; i < c.size(); ++i) {
    const double r = std::abs(c[i]) / E[i];
    if (r > out.C) {
      out.C = r;
      best = i;
    }
  }
  out.argmax = c.box().point(best);
  return out;
}

bool exponent_condition(const KernelSpec& s) {
  return ell(s.model) * (s.d - s.alpha2()) >= s.d + s.alpha;
}

bool alpha_regime_ok(const KernelSpec& s) {
  return s.alpha <= 2.0 + (ell(s.model) - 1) * (s.d - s.d_c());
}

LaceData build_tilde_D(double p, const StepDistribution& D, const Field& Pi) {
  if (!(p > kMinActivity && p <= kMaxActivity)) throw LaceError("p must lie in (0, 1.2]");
  if (Pi.box() != D.box) throw LaceError("Pi and D live on different boxes");
  if (!alpha_regime_ok(D.spec)) throw LaceError("alpha exceeds 2 + (ell-1)(d-d_c); lace pipeline refused");
  const Box& box = D.box;
  LaceData out;
  out.p = p;
  out.Pi = Pi;
  out.Pi0 = Pi[0];
  Field w = p * D.D + Pi;
  w[0] = 0.0;
  out.positivity_margin = std::numeric_limits<double>::infinity();
  Index worst = 1;
  for (Index i = 1; i < box.size(); ++i)
    if (w[i] < out.positivity_margin) {
      out.positivity_margin = w[i];
      worst = i;
    }
  out.margin_argmin = box.point(worst);
  if (out.positivity_margin < 0.0) {
    std::ostringstream msg;
    msg << "pD + Pi is negative at x = (";
    for (std::size_t a = 0; a < out.margin_argmin.size(); ++a) msg << (a ? "," : "") << out.margin_argmin[a];
    msg << "): " << out.positivity_margin;
    throw LaceError(msg.str());
  }
  const double off = sum(Pi) - Pi[0];
  out.A_p = 1.0 / (1.0 - out.Pi0);
  out.mu_p = (p + off) / (1.0 - out.Pi0);
  out.tildeD = from_weights(D.spec, w);
  for (Index i = 1; i < box.size(); ++i)
    if (D.D[i] > 0.0)
      out.space_deviation = std::max(out.space_deviation, std::abs(out.tildeD.D[i] / D.D[i] - 1.0));
  for (Index i = 1; i < box.size(); ++i) {
    const double den = 1.0 - D.Dhat[i].real();
    if (den > 0.0)
      out.fourier_deviation =
          std::max(out.fourier_deviation, std::abs((1.0 - out.tildeD.Dhat[i].real()) / den - 1.0));
  }
  return out;
}

BootstrapEvaluation bootstrap_b(const Field& G, const KernelSpec& spec, double p, double K_C) {
  if (!(K_C > 0.0)) throw LaceError("K_C must be positive");
  const Box& box = G.box();
  BootstrapEvaluation out;
  out.p = p;
  out.K_C_used = K_C;
  double sup = -std::numeric_limits<double>::infinity();
  Index best = -1;
  for (Index i = 1; i < box.size(); ++i) {
    const double r = G[i] / (K_C * upper_bound_formula(box.norm(i), 1.0, spec));
    if (r > sup || (r == sup && box.point(i) < box.point(best))) {
      sup = r;
      best = i;
    }
  }
  out.b_value = std::max(p, sup);
  if (best >= 0) out.argmax_x = box.point(best);
  return out;
}

IdentityReport verify_identity(const Field& G, const LaceData& lace, double tol) {
  if (!(lace.mu_p < 1.0))
    throw LaceError("mu_p >= 1: the identity at criticality needs the series route");
  if (lace.positivity_margin < 0.0) throw LaceError("tilde-D not constructed");
  const Box& box = G.box();
  if (box != lace.tildeD.box) throw LaceError("box mismatch");
  const GreensFunction S = greens_fourier(lace.tildeD, lace.mu_p);
  IdentityReport rep;
  const double rmax = static_cast<double>(box.side()) / 8.0;
  for (Index i = 0; i < box.size(); ++i) {
    const double model = lace.A_p * S.values[i];
    const double diff = std::abs(G[i] - model);
    rep.sup_abs = std::max(rep.sup_abs, diff);
    if (box.norm(i) <= rmax) rep.sup_rel = std::max(rep.sup_rel, diff / std::abs(model));
  }
  rep.chi = sum(G);
  rep.chi_bridge = lace.A_p / (1.0 - lace.mu_p);
  rep.subcritical_defect = std::abs(1.0 - 1.0 / rep.chi - lace.p - sum(lace.Pi));
  rep.pass = rep.sup_rel <= tol;
  return rep;
}

}  // namespace lrlab
