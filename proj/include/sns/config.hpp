#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sns/forcing.hpp"
#include "sns/integrator.hpp"
#include "sns/toy_model.hpp"

namespace sns {

struct ForcingConfig {
  std::optional<double> flat;                      ///< gamma on every shell mode
  std::vector<std::pair<Mode, double>> modes;      ///< explicit table, both signs

  ForcingSpec build(const Lattice& lattice) const;
};

struct InitialConfig {
  std::string type = "zero";  ///< zero | random | file
  double norm = 1.0;
  double decay = 0.0;
  std::string path;
};

struct VerifySection {
  std::vector<std::string> checks = {"orthogonality", "kernel_equivalence", "contraction",
                                     "semigroup",     "delta_f",            "girsanov"};
  KernelKind kernel = KernelKind::fft;
  int fields = 20;
  int instances = 10;
  double amplitude = 0.5;
  int steps = 40;
  int delta_f_draws = 100;
  int girsanov_samples = 2000;
  double girsanov_dt = 0.005;
};

struct EstimateCheck {
  std::string type;  ///< exp_moment | tail | tail_curve | sup_tail | block_tail | block_sweeps | novikov | coupling | ito
  std::size_t samples = 0;
  double t = 1.0;
  double D = 0.0;
  std::vector<double> grid;  ///< D-grid, A-grid or beta grid
  int t_start = 1;
  int t_prime = 2;
  int length = 2;
  double beta = 1.0;
  std::vector<int> lengths;
  double lambda = -0.25;
  double amplitude = 0.2;
  Mode mode{1, 0};
  double T = 2.0;
  double norm = 0.5;
  std::vector<double> dts;
};

struct EstimateSection {
  std::size_t samples = 500;
  std::size_t min_samples = 100;
  double k_se = 3.0;
  std::vector<EstimateCheck> checks;
};

struct ToySection {
  ToyChainSpec chain;
  int n_max = 30;
  bool two_state = true;
  int random_chains = 0;
  int random_states = 50;
  bool resolution = false;
  std::vector<int> delta_distances;
  std::optional<MixingSettings> mixing;
};

/// Fully validated run configuration. Every key of the input document is
/// either consumed or rejected.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out = "out";
  int kmax = 4;
  int n_forced = 2;
  ForcingConfig forcing;
  IntegratorConfig integrator;
  KernelKind kernel = KernelKind::fft;
  InitialConfig initial;
  VerifySection verify;
  EstimateSection estimate;
  ToySection toy;

  Lattice lattice() const { return Lattice(kmax, n_forced); }
  /// Every field with defaults filled in; parse_config(to_json()) round-trips.
  nlohmann::json to_json() const;
};

/// Parses and validates a configuration document for `command`. A top-level
/// "manifest" key (as written next to run outputs) is ignored. Errors are
/// ConfigError with the field path, e.g. "config.integrator.dt: ...".
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);
RunConfig load_config(const std::string& path, const std::string& command);

}  // namespace sns
