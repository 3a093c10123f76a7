#include "commands.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  using namespace lrlab::cli;
  CLI::App app{"lrlab: long-range walk, lace and percolation laboratory"};
  app.require_subcommand(1);

  Options opt;
  std::uint64_t seed = 0;
  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
  };
  const Entry entries[] = {
      {"kernel", "build a step distribution and check its assumptions", cmd_kernel},
      {"greens", "Green's functions, bounds and crossover profiles", cmd_greens},
      {"saw", "exact self-avoiding walk enumeration and lace coefficients", cmd_saw},
      {"perc", "Monte Carlo percolation two-point function", cmd_perc},
      {"riesz", "Bochner-Riesz critical sum demonstration", cmd_riesz},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", opt.config, "INI config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 1024))->capture_default_str();
    sub->add_option("--seed", seed, "RNG seed (overrides the config)");
    subs.emplace_back(sub, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  for (auto [sub, e] : subs) {
    if (!sub->parsed()) continue;
    if (sub->count("--seed") > 0) opt.seed = seed;
    return run(e->fn, opt);
  }
  return kValidation;
}
