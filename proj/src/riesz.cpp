#include "lrlab/riesz.hpp"

#include "lrlab/greens.hpp"

#include <algorithm>
#include <cmath>

namespace lrlab {

std::complex<double> bochner_riesz(const Field& f, double R, double alpha_BR, const Frequency& k0) {
  const Box& box = f.box();
  if (!(R > 0.0)) throw RieszError("R must be positive");
  if (!(alpha_BR >= 0.0)) throw RieszError("alpha_BR must be >= 0");
  if (R > static_cast<double>(box.side()) / 2.0) throw RieszError("R exceeds the box inradius M/2");
  if (static_cast<int>(k0.size()) != box.dim()) throw RieszError("k0 dimension differs from the box");
  const double R2 = R * R;
  Eigen::ArrayXd re(box.size()), im(box.size());
  Index n = 0;
  for (Index i = 0; i < box.size(); ++i) {
    const double r2 = box.norm2(i);
    if (r2 > R2 || f[i] == 0.0) continue;
    const double w = std::pow(1.0 - r2 / R2, alpha_BR) * f[i];
    double phase = 0.0;
    for (int a = 0; a < box.dim(); ++a) phase += k0[a] * static_cast<double>(box.coord(i, a));
    re[n] = w * std::cos(phase);
    im[n] = w * std::sin(phase);
    ++n;
  }
  return {sum(Eigen::ArrayXd(re.head(n))), sum(Eigen::ArrayXd(im.head(n)))};
}

double default_alpha_BR(int d) { return (d - 1) / 2.0 + 1.0; }

RieszEvaluation::RieszEvaluation(const Field& f, double R, double alpha_BR, Frequency k0)
    : R_(R), alpha_(alpha_BR), k0_(std::move(k0)) {
  const int d = f.box().dim();
  if (!(alpha_BR > (d - 1) / 2.0)) throw RieszError("alpha_BR must exceed (d-1)/2");
  value_ = bochner_riesz(f, R_, alpha_, k0_);
}

ConvergenceReport verify_convergence(const Field& f,
                                     const std::function<std::complex<double>(const Frequency&)>& u_ref,
                                     const Frequency& k0, const std::vector<double>& R_grid, double alpha_BR,
                                     bool continuous_at_k0) {
  ConvergenceReport rep;
  const int d = f.box().dim();
  rep.hypothesis_ok = continuous_at_k0 && alpha_BR > (d - 1) / 2.0;
  const Field one = delta(f.box());
  const std::complex<double> target = u_ref(k0);
  for (double R : R_grid) {
    ConvergenceRow row;
    row.R = R;
    row.value = bochner_riesz(f, R, alpha_BR, k0);
    row.error = std::abs(row.value - target);
    rep.rows.push_back(row);
    rep.normalization_defect =
        std::max(rep.normalization_defect, std::abs(bochner_riesz(one, R, alpha_BR, k0) - 1.0));
  }
  if (rep.hypothesis_ok && rep.rows.size() >= 2) {
    const std::size_t h = rep.rows.size() / 2;
    double first = 0, second = 0;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      double& m = i < h ? first : second;
      m = std::max(m, rep.rows[i].error);
    }
    rep.envelope_decays = second < first;
  }
  return rep;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Converges: return "converges";
    case Classification::Diverges: return "diverges";
    case Classification::Undecided: return "undecided";
  }
  return "?";
}

std::vector<double> geometric_grid(double lo, double hi, double ratio) {
  std::vector<double> g;
  for (double r = lo; r <= hi * (1 + 1e-12); r *= ratio) g.push_back(r);
  return g;
}

DemoReport critical_sum_demo(const Field& F, const std::vector<double>& R_grid, double alpha_BR) {
  if (R_grid.empty()) throw RieszError("empty R grid");
  const Box& box = F.box();
  DemoReport rep;
  rep.sum_F = sum(F);
  Spectrum Fh = fourier(F);
  rep.Fhat0 = Fh[0].real();
  const double scale = F.values().abs().sum();
  rep.zero_mode_removed = std::abs(Fh[0]) <= 1e-12 * scale;
  Eigen::ArrayXcd inv(box.size());
  for (Index i = 0; i < box.size(); ++i) {
    if (i == 0 && rep.zero_mode_removed) {
      inv[i] = 0.0;
      continue;
    }
    if (std::abs(Fh[i]) <= 1e-14 * scale) throw RieszError("F^ vanishes at a nonzero grid frequency");
    inv[i] = 1.0 / Fh[i];
  }
  Field G = inverse_fourier_real(Spectrum(box, inv, F.symmetric()));
  if (rep.zero_mode_removed) G = grounded(G);
  const Frequency k0(box.dim(), 0.0);
  std::vector<double> Rs, Ws;
  for (double R : R_grid) {
    const double W = bochner_riesz(G, R, alpha_BR, k0).real();
    rep.rows.push_back({R, W});
    Rs.push_back(R);
    Ws.push_back(W);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < Ws.size(); ++i)
    if (Ws[i] < Ws[i - 1]) rep.monotone = false;
  rep.growth_slope = loglog_fit(Rs, Ws).slope;
  rep.limit_estimate = Ws.back();
  const std::size_t h = Ws.size() / 2;
  const double tail_slope =
      loglog_fit(std::vector<double>(Rs.begin() + h, Rs.end()), std::vector<double>(Ws.begin() + h, Ws.end())).slope;
  if (tail_slope > 0.1) {
    rep.classification = Classification::Diverges;
  } else if (!rep.zero_mode_removed && Ws.size() >= 3) {
    const std::size_t n = Ws.size();
    if (std::abs(Ws[n - 1] - Ws[n - 2]) <= std::abs(Ws[n - 2] - Ws[n - 3])) rep.classification = Classification::Converges;
  }
  return rep;
}

}  // namespace lrlab
