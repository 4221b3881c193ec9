#pragma once

// Scenario configuration: flat key-value text with dotted namespaces.
// Unknown keys are hard errors. Defaults follow the reference operating
// point: 8.9 dB input squeezing, bias 2√π×0.045 with a 2√π×0.007
// pulse-shaping offset, feedback 2√π×0.065, and the standard trap noise
// model (10/s heating both ways, 20/s dephasing, 50 Hz harmonics of
// amplitude (25,1,29,3,31) Hz, 6 Hz drift, recoil norm 0.13).

#include <string>
#include <vector>

#include "gkp/modular.hpp"

namespace gkp {

struct ScenarioConfig {
  std::string scenario;  // epsilon_sweep | stabilizer_onset | lifetimes | logical_init | charfn

  std::string code = "square";
  double squeezing_db = 8.9;
  double kappa = 0;  // 0 = derive from squeezing_db

  int dim = 300;
  double tail_tol = 1e-6;

  double stab_eps = 0.045 * kTwoSqrtPi;
  double stab_mu = 0.065 * kTwoSqrtPi;
  double stab_eps_offset = 0.007 * kTwoSqrtPi;

  bool readout_eps_auto = true;
  double readout_eps_logical = 0;
  double readout_eps_stabilizer = 0;
  int readout_shots = 0;

  double init_eps = 0.06 * kSqrtPi;

  int cycles = 12;
  int traj = 200;
  std::uint64_t seed = 20210811;
  std::string mode = "sampled";  // exact | sampled
  int threads = 0;               // 0 = hardware
  double dt_us = 1.0;
  int readout_every = 1;
  std::vector<double> times_ms;  // lifetime sample times

  bool noise_enabled = true;
  double gamma_down = 10, gamma_up = 10, gamma_deph = 20;
  std::vector<double> mains_freqs{50, 100, 150, 200, 250};
  std::vector<double> mains_amps{25, 1, 29, 3, 31};
  std::vector<double> mains_phases{0, 0, 0, 0, 0};
  bool line_trigger = false;
  bool mains_half = false;
  double drift_sigma_hz = 6;
  bool recoil_enabled = true;
  double recoil_mean_photons = 2;
  double recoil_norm = 0.13;

  std::vector<double> sweep_eps;  // explicit grid; empty = min/max/count
  double sweep_eps_min = 0;
  double sweep_eps_max = 0.12 * kTwoSqrtPi;
  int sweep_count = 25;
  std::vector<int> sweep_ks{1, 2};

  std::vector<std::string> eigenstates{"+x", "-x", "+y", "-y", "+z", "-z"};
  std::string lifetime_stabilized = "both";  // on | off | both

  double charfn_extent = 2.0 * kTwoSqrtPi;
  int charfn_points = 41;
  std::string charfn_state = "ideal0";  // vacuum | ideal0 | ideal1 | prep | pumped

  std::string out_dir = ".";
  std::string out_prefix = "";

  double kappa_effective() const { return kappa > 0 ? kappa : kappa_from_db(squeezing_db); }
  double squeeze_r() const { return squeezing_db_to_r(squeezing_db); }
  NoiseModel noise_model() const;
  void validate() const;
};

ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin);

std::string config_to_json(const ScenarioConfig& c);

}  // namespace gkp
