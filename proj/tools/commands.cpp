#include "commands.hpp"

#include "lrlab/config.hpp"
#include "lrlab/io.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <new>

namespace lrlab::cli {

namespace {

const std::vector<std::string> kKernelKeys = {"kernel.d", "kernel.alpha", "kernel.L", "kernel.M", "kernel.model"};

std::vector<std::string> with_kernel(std::vector<std::string> keys) {
  keys.insert(keys.begin(), kKernelKeys.begin(), kKernelKeys.end());
  return keys;
}

// Bookkeeping shared by every command: config, output paths and the manifest.
class Run {
 public:
  Run(std::string command, const Options& opt) : opt_(opt), start_(std::chrono::steady_clock::now()) {
    if (opt.config.empty()) throw ValidationError("--config is required");
    cfg_ = Config::load(opt.config);
    man_.command = std::move(command);
    man_.threads = opt.threads;
  }

  const Config& cfg() const { return cfg_; }
  const Options& opt() const { return opt_; }
  RunManifest& manifest() { return man_; }

  // Freezes the manifest config; call after all overrides are known and before writing outputs.
  void begin() {
    man_.config = cfg_.entries();
    if (opt_.seed) man_.config["cli.seed"] = std::to_string(*opt_.seed);
    hash_ = man_.hash();
    std::filesystem::create_directories(opt_.out);
  }

  const std::string& hash() const { return hash_; }

  std::string output(const std::string& name) {
    const std::string path = (std::filesystem::path(opt_.out) / name).string();
    man_.outputs.push_back(path);
    return path;
  }

  void finish() {
    man_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    man_.peak_rss_mb = peak_rss_mb();
    const std::string path = (std::filesystem::path(opt_.out) / (man_.command + "_manifest.json")).string();
    write_json(path, man_.to_json());
    std::cerr << man_.command << ": manifest " << path << '\n';
  }

 private:
  Options opt_;
  std::chrono::steady_clock::time_point start_;
  Config cfg_;
  RunManifest man_;
  std::string hash_;
};

void check_site_budget(int d, std::int64_t M) {
  Index n = 1;
  for (int a = 0; a < d; ++a) {
    if (n > kDefaultSiteBudget / M) throw ResourceError("box M^d exceeds the site budget " + std::to_string(kDefaultSiteBudget));
    n *= M;
  }
}

KernelConfig read_kernel(const Config& cfg) {
  KernelConfig k = kernel_config(cfg);
  check_site_budget(k.spec.d, k.M);
  return k;
}

StepDistribution make_kernel(const KernelConfig& k) {
  return build_kernel(k.spec, make_box(k.spec.d, k.M), k.tail_mass_cap);
}

Point axis_point(int d, Index r) {
  Point x(d, 0);
  x[0] = r;
  return x;
}

std::vector<Index> radial_grid(double lo, double hi, double ratio) {
  std::vector<Index> rs;
  for (double r = lo; r <= hi * (1 + 1e-12); r *= ratio) {
    const Index x = std::llround(r);
    if (rs.empty() || x != rs.back()) rs.push_back(x);
  }
  return rs;
}

void require_model(const KernelConfig& k, Model m) {
  if (k.spec.model != m) throw ValidationError("kernel.model: this command needs " + to_string(m));
}

Json run_header(Run& run, const KernelConfig& k) {
  Json j;
  j["manifest"] = run.hash();
  j["kernel"] = to_json(k.spec);
  j["kernel"]["M"] = k.M;
  return j;
}

}  // namespace

int cmd_kernel(const Options& opt) {
  Run run("kernel", opt);
  run.cfg().require(kKernelKeys);
  const KernelConfig k = read_kernel(run.cfg());
  run.begin();

  const StepDistribution D = make_kernel(k);
  const AssumptionReport a = check_assumption(D);
  Json j = run_header(run, k);
  j["tail_mass_cut"] = D.tail_mass_cut;
  j["renorm_factor"] = D.renorm_factor;
  j["assumption"] = to_json(a);
  j["pass"] = a.pass;
  write_json(run.output("kernel_report.json"), j);

  std::vector<std::vector<std::string>> rows;
  for (Index r = 0; r <= k.M / 2; ++r) {
    const Index i = D.box.index(axis_point(k.spec.d, r));
    rows.push_back({std::to_string(r), fmt(D.D[i]), fmt(nnnorm(static_cast<double>(r), k.spec.L))});
  }
  write_table(run.output("kernel_profile.csv"), run.hash(), {"x", "D", "nnnorm"}, rows);
  run.finish();
  if (!a.pass) throw NumericFailure("kernel: assumption check failed");
  return kOk;
}

int cmd_greens(const Options& opt) {
  Run run("greens", opt);
  const Config& cfg = run.cfg();
  cfg.require(with_kernel({"greens.mu"}));
  const KernelConfig k = read_kernel(cfg);
  const std::vector<double> mus = cfg.get_list("greens.mu");
  if (mus.empty()) throw ValidationError("greens.mu: empty list");
  for (double mu : mus) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("greens.mu: " + fmt(mu) + " outside [0, 1]");
    if (mu == 1.0 && !(k.spec.d > k.spec.alpha2()))
      throw ValidationError("greens.mu: mu = 1 needs d > min(alpha, 2); the critical sum diverges");
  }
  const double x_lo = cfg.get_double_or("greens.x_lo", 8 * k.spec.L);
  const double x_hi = cfg.get_double_or("greens.x_hi", static_cast<double>(k.M) / 8);
  const double ratio = cfg.get_double_or("greens.x_ratio", 1.1);
  const double tol = cfg.get_double_or("greens.tol", 1e-12);
  if (!(x_lo >= 1.0)) throw ValidationError("greens.x_lo: must be >= 1");
  if (!(x_hi >= x_lo && x_hi <= static_cast<double>(k.M) / 2)) throw ValidationError("greens.x_hi: must lie in [x_lo, M/2]");
  if (!(ratio > 1.0)) throw ValidationError("greens.x_ratio: must exceed 1");
  if (!(tol > 0.0)) throw ValidationError("greens.tol: must be positive");
  run.begin();

  const StepDistribution D = make_kernel(k);
  std::vector<Point> xs;
  for (Index r : radial_grid(x_lo, x_hi, ratio)) xs.push_back(axis_point(k.spec.d, r));
  const CrossoverProfile prof = crossover_profile(D, mus, xs);
  write_crossover_csv(run.output("crossover.csv"), run.hash(), prof);
  std::vector<std::vector<std::string>> ratio_rows;
  for (const ProfileRow& r : prof.rows) {
    const double b = upper_bound_formula(r.x_norm, r.mu, k.spec);
    ratio_rows.push_back({fmt(r.mu), fmt(r.x_norm), fmt(r.S), fmt(b), fmt(r.S / b)});
  }
  write_table(run.output("bound_ratio.csv"), run.hash(), {"mu", "x_norm", "S", "bound", "ratio"}, ratio_rows);

  Json j = run_header(run, k);
  j["window"] = {prof.window_lo, prof.window_hi};
  bool finite = true;
  for (std::size_t m = 0; m < mus.size(); ++m) {
    std::cerr << "greens: mu = " << mus[m] << '\n';
    const GreensFunction S = greens_series(D, mus[m], tol);
    const BoundReport b = check_upper_bound(S);
    finite = finite && std::isfinite(b.sup_ratio);
    Json e;
    e["mu"] = mus[m];
    e["method"] = to_string(S.method);
    e["grounded"] = S.grounded;
    e["terms"] = S.N_used;
    e["remainder_bound"] = S.remainder_bound;
    e["upper_bound"] = to_json(b);
    e["near_fit"] = to_json(prof.near_fit[m]);
    e["far_fit"] = to_json(prof.far_fit[m]);
    e["crossover_x"] = prof.crossover_x[m];
    e["lower_ratio_min"] = prof.lower_ratio_min[m];
    j["mu"].push_back(e);
  }
  write_json(run.output("greens_report.json"), j);
  run.finish();
  if (!finite) throw NumericFailure("greens: upper-bound ratio is not finite");
  return kOk;
}

int cmd_saw(const Options& opt) {
  Run run("saw", opt);
  const Config& cfg = run.cfg();
  cfg.require(with_kernel({"saw.p", "saw.n_max"}));
  const KernelConfig k = read_kernel(cfg);
  require_model(k, Model::SAW);
  const double p = cfg.get_double("saw.p");
  const std::int64_t n_max = cfg.get_int("saw.n_max");
  SawOptions so;
  so.support_cut = cfg.get_double_or("saw.support_cut", 0.0);
  so.state_budget = cfg.get_int_or("saw.state_budget", so.state_budget);
  if (!(p > kMinActivity && p <= kMaxActivity)) throw ValidationError("saw.p: must lie in (0, 1.2]");
  if (n_max < 1 || n_max > 64) throw ValidationError("saw.n_max: must lie in [1, 64]");
  if (!(so.support_cut >= 0.0)) throw ValidationError("saw.support_cut: must be >= 0");
  if (so.state_budget < 1) throw ValidationError("saw.state_budget: must be positive");
  Index sites = 1;
  for (int a = 0; a < k.spec.d; ++a) sites *= k.M;
  if (sites > 64) throw ResourceError("saw: the enumeration holds at most 64 sites, the box has " + std::to_string(sites));
  run.begin();

  const StepDistribution D = make_kernel(k);
  std::cerr << "saw: enumerating to n = " << n_max << '\n';
  const SawEnumeration e = enumerate_saw(D, p, static_cast<int>(n_max), so);
  const PiExtraction x = extract_pi(e);
  const LaceData l = build_tilde_D(p, D, x.Pi);
  const PiDecayReport decay = check_pi_decay(x.Pi, k.spec);
  const double tol = std::max(10.0 * e.truncation_bound, 1e-10);
  const IdentityReport id = verify_identity(e.G, l, tol);

  Json j = run_header(run, k);
  j["enumeration"] = {{"p", p},
                      {"n_max", n_max},
                      {"complete", e.complete},
                      {"states", e.states},
                      {"truncation_bound", e.truncation_bound},
                      {"length_bound", e.length_bound},
                      {"cut_bound", e.cut_bound}};
  j["pi"] = {{"residual", x.residual},
             {"min_abs_Ghat", x.min_abs_Ghat},
             {"Pi0", x.Pi[0]},
             {"sup_constant", decay.sup_constant},
             {"sum_constant", decay.sum_constant}};
  j["lace"] = to_json(l);
  j["identity"] = to_json(id);
  j["identity_tolerance"] = tol;
  write_json(run.output("saw_report.json"), j);

  std::vector<std::vector<std::string>> rows;
  for (Index i = 0; i < D.box.size(); ++i)
    rows.push_back({std::to_string(D.box.coord(i, 0)), fmt(D.box.norm(i)), fmt(e.G[i]), fmt(x.Pi[i]), fmt(D.D[i])});
  write_table(run.output("saw_fields.csv"), run.hash(), {"x", "x_norm", "G", "Pi", "D"}, rows);
  run.finish();

  if (x.residual > 1e-10) throw NumericFailure("saw: extraction residual " + fmt(x.residual) + " exceeds 1e-10");
  if (!(l.positivity_margin > 0.0)) throw NumericFailure("saw: tilde-D positivity margin is not positive");
  if (!id.pass) throw NumericFailure("saw: identity deviation exceeds " + fmt(tol));
  return kOk;
}

int cmd_perc(const Options& opt) {
  Run run("perc", opt);
  const Config& cfg = run.cfg();
  cfg.require(with_kernel({"perc.p", "perc.trials"}));
  const KernelConfig k = read_kernel(cfg);
  require_model(k, Model::PERC);
  const std::vector<double> ps = cfg.get_list("perc.p");
  const std::int64_t trials = cfg.get_int("perc.trials");
  if (!opt.seed && !cfg.has("perc.seed")) throw ValidationError("perc.seed: missing (or pass --seed)");
  const std::uint64_t seed = opt.seed ? *opt.seed : cfg.get_u64("perc.seed");
  const double rmax = static_cast<double>(k.M) / 8;
  const double window_lo = cfg.get_double_or("perc.fit_window_lo", 8 * k.spec.L);
  EstimateOptions eo;
  eo.bin_ratio = cfg.get_double_or("perc.bin_ratio", 1.25);
  std::vector<double> radii = cfg.has("perc.targets") ? cfg.get_list("perc.targets") : std::vector<double>{};
  if (ps.empty()) throw ValidationError("perc.p: empty list");
  for (double p : ps)
    if (!(p >= 0.0)) throw ValidationError("perc.p: " + fmt(p) + " is negative");
  if (trials <= 0) throw ValidationError("perc.trials: must be positive");
  if (!(eo.bin_ratio > 1.0)) throw ValidationError("perc.bin_ratio: must exceed 1");
  for (double r : radii)
    if (!(std::abs(r) <= rmax) || r != std::floor(r)) throw ValidationError("perc.targets: " + fmt(r) + " is not an integer in [-M/8, M/8]");
  run.manifest().seeds = {seed};
  run.begin();

  const StepDistribution D = make_kernel(k);
  const double dmax = D.D.values().maxCoeff();
  for (double p : ps)
    if (p * dmax > 1.0) throw ValidationError("perc.p: p * max D exceeds 1 at p = " + fmt(p));

  std::vector<Point> targets{axis_point(k.spec.d, 0)};
  if (radii.empty()) {
    for (Index r : radial_grid(1, rmax, 1.25)) targets.push_back(axis_point(k.spec.d, r));
  } else {
    for (double r : radii) targets.push_back(axis_point(k.spec.d, static_cast<Index>(r)));
  }

  std::vector<TwoPointEstimate> ests;
  Json j = run_header(run, k);
  int violations = 0;
  for (double p : ps) {
    PercConfig pc{k.spec, p, D.box, trials, seed, opt.threads};
    EstimateOptions o = eo;
    o.progress = [p](std::int64_t done, std::int64_t total) {
      std::cerr << "perc: p = " << p << " trials " << done << "/" << total << '\n';
    };
    TwoPointEstimate e = estimate_two_point(pc, D, targets, o);
    for (const TwoPointRow& r : e.rows)
      if (r.ghat < p * D.D.at(r.x) - 3.0 * r.stderr) ++violations;
    j["estimates"].push_back({{"p", p},
                              {"trials_kept", e.trials},
                              {"wrap_flagged", e.wrap_flagged},
                              {"mean_cluster_size", e.mean_cluster_size},
                              {"origin_degree", e.origin_degree},
                              {"origin_degree_stderr", e.origin_degree_stderr}});
    if (e.trials == 0) throw NumericFailure("perc: every trial was wrap-flagged at p = " + fmt(p));
    ests.push_back(std::move(e));
  }
  j["lower_bound_violations"] = violations;
  if (ests.size() >= 3) j["fit"] = to_json(crossover_fit(ests, window_lo));
  write_perc_csv(run.output("perc_two_point.csv"), run.hash(), ests);
  write_perc_bins_csv(run.output("perc_bins.csv"), run.hash(), ests);
  write_json(run.output("perc_report.json"), j);
  run.finish();
  if (violations > 0) throw NumericFailure("perc: single-bond lower bound violated at " + std::to_string(violations) + " targets");
  return kOk;
}

int cmd_riesz(const Options& opt) {
  Run run("riesz", opt);
  const Config& cfg = run.cfg();
  cfg.require(with_kernel({"riesz.delta_weight", "riesz.kernel_weight", "riesz.R_lo", "riesz.R_hi"}));
  const KernelConfig k = read_kernel(cfg);
  const double a = cfg.get_double("riesz.delta_weight");
  const double c = cfg.get_double("riesz.kernel_weight");
  const double R_lo = cfg.get_double("riesz.R_lo");
  const double R_hi = cfg.get_double("riesz.R_hi");
  const double ratio = cfg.get_double_or("riesz.R_ratio", 2.0);
  const double alpha_BR = cfg.get_double_or("riesz.alpha_BR", default_alpha_BR(k.spec.d));
  if (!(R_lo > 0.0 && R_hi >= R_lo)) throw ValidationError("riesz.R_lo, riesz.R_hi: need 0 < R_lo <= R_hi");
  if (!(R_hi <= static_cast<double>(k.M) / 2)) throw ValidationError("riesz.R_hi: exceeds M/2");
  if (!(ratio > 1.0)) throw ValidationError("riesz.R_ratio: must exceed 1");
  if (!(alpha_BR > (k.spec.d - 1) / 2.0)) throw ValidationError("riesz.alpha_BR: must exceed (d-1)/2");
  run.begin();

  const StepDistribution D = make_kernel(k);
  const Field F = a * delta(D.box) - c * D.D;
  const DemoReport rep = critical_sum_demo(F, geometric_grid(R_lo, R_hi, ratio), alpha_BR);
  write_riesz_csv(run.output("riesz.csv"), run.hash(), rep);
  Json j = run_header(run, k);
  j["F"] = {{"delta_weight", a}, {"kernel_weight", c}};
  j["alpha_BR"] = alpha_BR;
  j["demo"] = to_json(rep);
  write_json(run.output("riesz_report.json"), j);
  run.finish();
  return kOk;
}

int run(int (*cmd)(const Options&), const Options& opt) {
  try {
    return cmd(opt);
  } catch (const NumericFailure& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ResourceError& e) {
    std::cerr << "resource budget: " << e.what() << '\n';
    return kResource;
  } catch (const SawError& e) {
    std::cerr << "resource budget: " << e.what() << '\n';
    return kResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource budget: out of memory\n";
    return kResource;
  } catch (const LaceError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const ConfigError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    // Kernel, lattice, greens and riesz domain errors.
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const PercError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace lrlab::cli
