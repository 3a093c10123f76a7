#pragma once

#include "lrlab/greens.hpp"
#include "lrlab/kernel.hpp"
#include "lrlab/lace.hpp"
#include "lrlab/percolation.hpp"
#include "lrlab/riesz.hpp"
#include "lrlab/saw.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lrlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string version = kVersion;
  std::vector<std::uint64_t> seeds;
  int threads = 1;
  std::vector<std::string> outputs;
  double wall_seconds = 0.0;
  double peak_rss_mb = 0.0;

  // FNV-1a over command, config, version, seeds and threads; stable across runs.
  std::string hash() const;
  Json to_json() const;
};

double peak_rss_mb();

// %.17g, round-trip exact.
std::string fmt(double v);

// Writes "# manifest <hash>", a header row and the rows, comma-separated.
void write_table(const std::string& path, const std::string& hash, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);
void write_json(const std::string& path, const Json& j);

// mu,x_norm,S,near_bound,far_bound,lower_bound,regime
void write_crossover_csv(const std::string& path, const std::string& hash, const CrossoverProfile& prof);
// p,x,ghat,stderr,trials,wrap_flagged; x is the point coordinates joined by ':'
void write_perc_csv(const std::string& path, const std::string& hash, const std::vector<TwoPointEstimate>& ests);
// p,r_lo,r_hi,r_mean,sites,ghat,stderr,pD_mean
void write_perc_bins_csv(const std::string& path, const std::string& hash, const std::vector<TwoPointEstimate>& ests);
// R,W,classification
void write_riesz_csv(const std::string& path, const std::string& hash, const DemoReport& rep);

Json to_json(const KernelSpec& s);
Json to_json(const AssumptionReport& r);
Json to_json(const BoundReport& r);
Json to_json(const SlopeFit& f);
Json to_json(const HeatKernelTable& t);
Json to_json(const LaceData& l);
Json to_json(const IdentityReport& r);
Json to_json(const BootstrapEvaluation& b);
Json to_json(const PercFit& f);
Json to_json(const DemoReport& r);

}  // namespace lrlab
