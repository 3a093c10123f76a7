#include "lrlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrlab {

Model parse_model(const std::string& name) {
  if (name == "RW" || name == "rw") return Model::RW;
  if (name == "SAW" || name == "saw") return Model::SAW;
  if (name == "PERC" || name == "perc") return Model::PERC;
  if (name == "ISING" || name == "ising") return Model::ISING;
  throw KernelError("unknown model '" + name + "' (expected RW, SAW, PERC or ISING)");
}

std::string to_string(Model m) {
  switch (m) {
    case Model::RW: return "RW";
    case Model::SAW: return "SAW";
    case Model::PERC: return "PERC";
    case Model::ISING: return "ISING";
  }
  return "?";
}

int ell(Model m) { return m == Model::PERC ? 2 : 3; }

double KernelSpec::d_c() const {
  const double l = ell(model);
  return (l + 1.0) / (l - 1.0) * alpha2();
}

void KernelSpec::validate() const {
  if (d < 1) throw KernelError("d must be >= 1");
  if (!(alpha > 0.0)) throw KernelError("alpha must be > 0");
  if (!(L >= 1.0)) throw KernelError("L must be >= 1");
}

double nnnorm(double r, double L) { return M_PI / 2.0 * std::max(r, L); }

double nnnorm(const Point& x, double L) {
  double s = 0;
  for (Index c : x) s += static_cast<double>(c) * static_cast<double>(c);
  return nnnorm(std::sqrt(s), L);
}

double tail_mass_bound(const KernelSpec& spec, Index M) {
  const double d = spec.d;
  const double s = std::sqrt(d) / 2.0;
  const double R = static_cast<double>(M) / 2.0;
  const double r0 = R - 2.0 * s;
  if (r0 <= 0) return std::numeric_limits<double>::infinity();
  const double sphere = 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
  const double scale = std::pow(M_PI / (2.0 * spec.L), -(d + spec.alpha));
  return scale * sphere * std::pow(1.0 + s / r0, d - 1.0) * std::pow(r0, -spec.alpha) / spec.alpha;
}

StepDistribution build_kernel(const KernelSpec& spec, const Box& box, double tail_mass_cap) {
  spec.validate();
  if (box.dim() != spec.d) throw KernelError("box dimension differs from kernel d");
  if (!(static_cast<double>(box.side()) > 4.0 * spec.L))
    throw KernelError("box side M must exceed 4L");
  StepDistribution out;
  out.spec = spec;
  out.box = box;
  Field v(box, true);
  const double expo = -(spec.d + spec.alpha);
  for (Index i = 1; i < box.size(); ++i) v[i] = std::pow(nnnorm(box.norm(i), spec.L) / spec.L, expo);
  const double Z = sum(v);
  const double T = tail_mass_bound(spec, box.side());
  out.tail_mass_cut = T / (Z + T);
  if (!(out.tail_mass_cut <= tail_mass_cap))
    throw KernelError("truncated tail mass bound " + std::to_string(out.tail_mass_cut) +
                      " exceeds cap " + std::to_string(tail_mass_cap));
  out.renorm_factor = Z;
  v.values() /= Z;
  out.D = std::move(v);
  out.Dhat = fourier(out.D);
  return out;
}

StepDistribution from_weights(const KernelSpec& spec, const Field& weights) {
  if (weights[0] != 0.0) throw KernelError("step weights must vanish at the origin");
  if ((weights.values() < 0.0).any()) throw KernelError("step weights must be nonnegative");
  const double Z = sum(weights);
  if (!(Z > 0.0)) throw KernelError("step weights have zero mass");
  StepDistribution out;
  out.spec = spec;
  out.box = weights.box();
  out.renorm_factor = Z;
  out.D = Field(weights.box(), weights.values() / Z, weights.symmetric());
  out.Dhat = fourier(out.D);
  return out;
}

AssumptionReport check_assumption(const StepDistribution& D) {
  const KernelSpec& s = D.spec;
  const Box& box = D.box;
  AssumptionReport r;
  r.K_lb_hat = std::numeric_limits<double>::infinity();
  r.K_ub_hat = 0.0;
  const double expo = s.d + s.alpha;
  const double La = std::pow(s.L, s.alpha);
  for (Index i = 1; i < box.size(); ++i) {
    const double ratio = D.D[i] * std::pow(nnnorm(box.norm(i), s.L), expo) / La;
    r.K_lb_hat = std::min(r.K_lb_hat, ratio);
    r.K_ub_hat = std::max(r.K_ub_hat, ratio);
  }
  double gap_far = std::numeric_limits<double>::infinity();
  double top = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < box.size(); ++i) {
    const double one_minus = 1.0 - D.Dhat[i].real();
    r.max_imag = std::max(r.max_imag, std::abs(D.Dhat[i].imag()));
    top = std::max(top, one_minus);
    double kinf = 0;
    for (int a = 0; a < box.dim(); ++a) kinf = std::max(kinf, std::abs(frequency(box, i, a)));
    if (kinf > 1.0 / s.L) gap_far = std::min(gap_far, one_minus);
  }
  r.Delta_hat = std::min(gap_far, 2.0 - top);
  r.pass = r.K_lb_hat > 0.0 && std::isfinite(r.K_ub_hat) && r.Delta_hat > 0.0 && r.Delta_hat < 1.0;
  return r;
}

IsingTransform ising_transform(double beta, const StepDistribution& J) {
  if (!(beta >= 0.0)) throw KernelError("beta must be >= 0");
  if (beta == 0.0) throw KernelError("zero coupling: beta = 0 gives p = 0 and D undefined");
  const Field& j = J.D;
  if (j[0] != 0.0 || (j.values() < 0.0).any()) throw KernelError("coupling must vanish at 0 and be >= 0");
  Field t(j.box(), (beta * j.values()).tanh(), j.symmetric());
  IsingTransform out;
  out.p = sum(t);
  if (!(out.p > 0.0)) throw KernelError("zero coupling: p = 0");
  out.D = from_weights(J.spec, t);
  const double mass = sum(j);
  for (Index i = 1; i < j.size(); ++i)
    if (j[i] > 0.0)
      out.shape_deviation = std::max(out.shape_deviation, std::abs(out.D.D[i] / j[i] * mass - 1.0));
  out.activity_deviation = std::abs(out.p / (beta * mass) - 1.0);
  return out;
}

}  // namespace lrlab
