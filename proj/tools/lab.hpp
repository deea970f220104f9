#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgl/gff.hpp"
#include "sgl/loewner.hpp"

namespace sgl::lab {

using json = nlohmann::json;

struct Check {
  std::string name;
  double lhs = 0, rhs = 0, residual = 0, tolerance = 0;
  bool pass = false;
  double seconds = 0;
  json detail = json::object();
};

struct Report {
  std::string name;
  std::vector<Check> checks;
  bool pass() const;
  json to_json() const;
};

const std::vector<std::string>& verify_names();
const std::vector<std::string>& experiment_names();

// throws std::invalid_argument for unknown names or malformed config
Report verify(const std::string& name, const json& config, std::uint64_t seed);

struct ExperimentResult {
  json summary = json::object();
  std::vector<std::string> files;
  bool pass = true;
};
ExperimentResult experiment(const std::string& name, const json& config, std::uint64_t seed,
                            const std::string& out_dir);

// RunManifest: command, config hash, master seed, per-worker seeds,
// versions and wall time
json manifest(const std::string& command, const json& config, std::uint64_t seed, int workers,
              double wall_seconds);

// Triangular-lattice disk for the level-line experiment: x at angle pi,
// y at angle 0, field values +-lambda on the two boundary arcs.
struct LevelLineDisk {
  LatticeDomain domain;
  cplx center;
  double radius = 0;
  int x = -1, y = -1;
};
LevelLineDisk level_line_disk(int radius);

struct LevelLineOptions {
  double field_scale = 1.3160740129524924;  // 3^{1/4}
  double run_time = 2.0;                    // nominal run length; W is read at run_time/4
  double cut_radius = 8.0;                  // |w| at which curves are cut
};

// One interface mapped to H by z -> i(1+z)/(1-z) on the rescaled disk and
// unzipped; nullopt if the extraction fails.
std::optional<Driver> level_line_driver(const LevelLineDisk& disk, const GffSampler& sampler,
                                        const LevelLineOptions& opt, Rng& rng,
                                        std::vector<cplx>* mapped = nullptr);

struct LevelLineStats {
  long paths = 0, used = 0, failed = 0;
  double t = 0;
  double var_ratio = 0;  // Var(W_t)/(4t)
  double mean = 0;
  double jb_pvalue = 0;  // normality of W_t/sqrt(t)
  double inc_jb_pvalue = 0;
  bool pass = false;
};
LevelLineStats level_line_experiment(int radius, long paths, std::uint64_t seed,
                                     const LevelLineOptions& opt = {},
                                     const std::string& out_dir = "");

}  // namespace sgl::lab
