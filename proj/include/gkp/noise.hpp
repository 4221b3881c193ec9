#pragma once

// Trap noise model: heating and dephasing jump operators, mains harmonics of
// the 50 Hz line, slow trap-frequency drift, and the photon-recoil sampler
// attached to ancilla repumping.

#include <vector>

#include "gkp/fock.hpp"

namespace gkp {

struct MainsModel {
  std::vector<double> freqs_hz{50, 100, 150, 200, 250};
  std::vector<double> amps_hz{25, 1, 29, 3, 31};
  std::vector<double> phases{0, 0, 0, 0, 0};  // used verbatim when line-triggered
  bool line_trigger = false;
  bool half_factor = false;  // apply δ(t)/2 instead of δ(t)
  void validate() const;
};

enum class RecoilAngles { isotropic_projected, fixed_axis };

struct RecoilModel {
  double mean_photons = 2.0;
  double kick_norm = 0.13;  // target E[‖(δq, δp)‖]
  RecoilAngles angles = RecoilAngles::isotropic_projected;
  double kick_per_photon = 0;  // solved from kick_norm at calibration

  // Solves kick_per_photon so the sampled mean kick norm equals kick_norm.
  void calibrate();
};

struct NoiseModel {
  bool enabled = true;
  double gamma_down = 10;   // rate of jump operator a   (1/s)
  double gamma_up = 10;     // rate of jump operator a†  (1/s)
  double gamma_deph = 20;   // rate of jump operator a†a (1/s)
  MainsModel mains;
  double drift_sigma = 2 * M_PI * 6;  // rad/s, Gaussian static detuning width
  RecoilModel recoil;
  bool recoil_enabled = true;
  void validate() const;
};

// δ(t) = 2π Σ A_i sin(2π f_i t + φ_i) in rad/s (halved if half_factor).
double mains_delta(double t, const MainsModel& m, const std::vector<double>& phases);

// Per-trajectory phase draw: configured phases when line-triggered, otherwise
// uniform on [0, 2π).
std::vector<double> draw_mains_phases(Rng& rng, const MainsModel& m);

double sample_drift(Rng& rng, double sigma);

struct JumpChannel {
  double rate;
  OscOperator op;
};

// [(γ↓, a), (γ↑, a†), (γφ, a†a)], skipping zero-rate channels.
std::vector<JumpChannel> jump_operators(const NoiseModel& model, const Operators& ops);

// Net displacement exponent from one repump event: photon count geometric on
// {0, 1, 2, ...} with the configured mean, each photon kicking the oscillator
// by kick_per_photon at a uniformly random motional phase. The displacement
// e^{i(δp·q − δq·p)} shifts the quadratures by (δq, δp).
DisplacementExponent sample_recoil(Rng& rng, const RecoilModel& model);

}  // namespace gkp
