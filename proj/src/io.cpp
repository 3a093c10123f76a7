#include "lrlab/io.hpp"

#include <sys/resource.h>

#include <cstdio>
#include <fstream>

namespace lrlab {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Json point_json(const Point& p) { return Json(p); }

std::string join_point(const Point& p) {
  std::string s;
  for (std::size_t a = 0; a < p.size(); ++a) s += (a ? ":" : "") + std::to_string(p[a]);
  return s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

}  // namespace

std::string RunManifest::hash() const {
  Json j;
  j["command"] = command;
  j["config"] = config;
  j["version"] = version;
  j["seeds"] = seeds;
  j["threads"] = threads;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

Json RunManifest::to_json() const {
  Json j;
  j["command"] = command;
  j["hash"] = hash();
  j["version"] = version;
  j["config"] = config;
  j["seeds"] = seeds;
  j["threads"] = threads;
  j["outputs"] = outputs;
  j["wall_seconds"] = wall_seconds;
  j["peak_rss_mb"] = peak_rss_mb;
  return j;
}

double peak_rss_mb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<double>(ru.ru_maxrss) / 1024.0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_table(const std::string& path, const std::string& hash, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto os = open_out(path);
  os << "# manifest " << hash << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
}

void write_json(const std::string& path, const Json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

void write_crossover_csv(const std::string& path, const std::string& hash, const CrossoverProfile& prof) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : prof.rows)
    rows.push_back({fmt(r.mu), fmt(r.x_norm), fmt(r.S), fmt(r.near_bound), fmt(r.far_bound), fmt(r.lower_bound),
                    r.far ? "far" : "near"});
  write_table(path, hash, {"mu", "x_norm", "S", "near_bound", "far_bound", "lower_bound", "regime"}, rows);
}

void write_perc_csv(const std::string& path, const std::string& hash, const std::vector<TwoPointEstimate>& ests) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : ests)
    for (const auto& r : e.rows)
      rows.push_back({fmt(e.p), join_point(r.x), fmt(r.ghat), fmt(r.stderr), std::to_string(r.trials),
                      std::to_string(e.wrap_flagged)});
  write_table(path, hash, {"p", "x", "ghat", "stderr", "trials", "wrap_flagged"}, rows);
}

void write_perc_bins_csv(const std::string& path, const std::string& hash,
                         const std::vector<TwoPointEstimate>& ests) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : ests)
    for (const auto& b : e.bins)
      rows.push_back({fmt(e.p), fmt(b.r_lo), fmt(b.r_hi), fmt(b.r_mean), std::to_string(b.sites), fmt(b.ghat),
                      fmt(b.stderr), fmt(b.pD_mean)});
  write_table(path, hash, {"p", "r_lo", "r_hi", "r_mean", "sites", "ghat", "stderr", "pD_mean"}, rows);
}

void write_riesz_csv(const std::string& path, const std::string& hash, const DemoReport& rep) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rep.rows) rows.push_back({fmt(r.R), fmt(r.W), to_string(rep.classification)});
  write_table(path, hash, {"R", "W", "classification"}, rows);
}

Json to_json(const KernelSpec& s) {
  return Json{{"d", s.d}, {"alpha", s.alpha}, {"L", s.L}, {"model", to_string(s.model)}};
}

Json to_json(const AssumptionReport& r) {
  return Json{{"K_lb_hat", r.K_lb_hat}, {"K_ub_hat", r.K_ub_hat}, {"Delta_hat", r.Delta_hat},
              {"max_imag", r.max_imag}, {"pass", r.pass}};
}

Json to_json(const BoundReport& r) {
  return Json{{"mu", r.mu}, {"sup_ratio", r.sup_ratio}, {"argmax", point_json(r.argmax)},
              {"argmax_norm", r.argmax_norm}, {"M", r.M}};
}

Json to_json(const SlopeFit& f) {
  return Json{{"slope", f.slope}, {"intercept", f.intercept}, {"stderr_slope", f.stderr_slope}, {"points", f.points}};
}

Json to_json(const HeatKernelTable& t) {
  Json j{{"window", t.window}, {"n_computed", t.n_computed}, {"truncated", t.truncated}};
  j["sup_norms"] = t.sup_norms;
  j["c_sup"] = t.c_sup;
  j["c_pt"] = t.c_pt;
  j["max_c_sup"] = t.max_c_sup();
  j["max_c_pt"] = t.max_c_pt();
  if (!t.notice.empty()) j["notice"] = t.notice;
  return j;
}

Json to_json(const LaceData& l) {
  Json j{{"p", l.p},
         {"Pi0", l.Pi0},
         {"mu_p", l.mu_p},
         {"A_p", l.A_p},
         {"positivity_margin", l.positivity_margin},
         {"margin_argmin", point_json(l.margin_argmin)},
         {"space_deviation", l.space_deviation},
         {"fourier_deviation", l.fourier_deviation}};
  if (l.decay_constants)
    j["decay_constants"] = {{"sup_constant", l.decay_constants->sup_constant},
                            {"sum_constant", l.decay_constants->sum_constant}};
  return j;
}

Json to_json(const IdentityReport& r) {
  return Json{{"sup_abs", r.sup_abs},       {"sup_rel", r.sup_rel},
              {"chi", r.chi},               {"chi_bridge", r.chi_bridge},
              {"subcritical_defect", r.subcritical_defect}, {"pass", r.pass}};
}

Json to_json(const BootstrapEvaluation& b) {
  return Json{{"p", b.p}, {"b", b.b_value}, {"argmax", point_json(b.argmax_x)}, {"K_C", b.K_C_used}};
}

Json to_json(const PercFit& f) {
  Json rows = Json::array();
  for (const auto& r : f.rows)
    rows.push_back({{"p", r.p},
                    {"x_switch", r.x_switch},
                    {"near_slope", r.near_fit.slope},
                    {"near_slope_err", r.near_fit.slope_err},
                    {"near_points", r.near_fit.points},
                    {"far_slope", r.far_fit.slope},
                    {"far_slope_err", r.far_fit.slope_err},
                    {"far_points", r.far_fit.points},
                    {"far_amplitude", r.far_amplitude},
                    {"far_amplitude_err", r.far_amplitude_err}});
  return Json{{"rows", rows},
              {"p_c", f.p_c},
              {"p_c_err", f.p_c_err},
              {"line_slope", f.line_slope},
              {"line_intercept", f.line_intercept}};
}

Json to_json(const DemoReport& r) {
  return Json{{"sum_F", r.sum_F},
              {"Fhat0", r.Fhat0},
              {"zero_mode_removed", r.zero_mode_removed},
              {"growth_slope", r.growth_slope},
              {"limit_estimate", r.limit_estimate},
              {"classification", to_string(r.classification)},
              {"monotone", r.monotone}};
}

}  // namespace lrlab
