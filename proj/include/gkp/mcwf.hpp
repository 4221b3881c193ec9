#pragma once

// Monte-Carlo wavefunction engine. Free evolution runs under
// H(t) = (δ_mains(t) + δ0)·a†a with jump operators a, a†, a†a; the detuning
// and decay parts are diagonal in the Fock basis so the no-jump propagator is
// applied exactly within each step and only the jump placement is discretized.
// Protocol pulses are instantaneous unitaries at scheduled instants.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gkp/modular.hpp"

namespace gkp {

struct NoiseContext {
  const NoiseModel* model = nullptr;
  std::vector<double> mains_phases;
  double drift = 0;  // static detuning draw, rad/s

  static NoiseContext draw(const NoiseModel& model, Rng& rng);
  static NoiseContext off();
  double detuning(double t) const;
  // ∫ δ(t') dt' over [t0, t1]; closed form per tone.
  double phase_integral(double t0, double t1) const;
};

struct JumpRecord {
  double t;
  int channel;  // 0 = a, 1 = a†, 2 = a†a
};

// Evolves for `duration` starting at absolute time t0. Per step the no-jump
// propagator is exact; jump decisions use first-order probabilities and the
// step is halved adaptively when they grow beyond 0.05.
void evolve_segment(const FockEngine& eng, HybridState& state, double t0,
                    double duration, const NoiseContext& ctx, double dt, Rng& rng,
                    std::vector<JumpRecord>* log = nullptr);

enum class Observable { Sz, Sx, Lx, Ly, Lz, RamseyRe, RamseyIm, MeanN };

std::string observable_name(Observable o);

// Schedule events; times are implicit (free segments carry durations, other
// events are instantaneous in the order listed).
struct EvFree {
  double duration;
};
struct EvRound {
  int round_index;  // 1 or 2
};
struct EvCycleMark {};  // advances the cycle counter and flips the Pauli frame
struct EvInit {
  Eigenstate which;
};
struct EvReadout {
  std::vector<Observable> obs;
};

using ScheduleEvent = std::variant<EvFree, EvRound, EvCycleMark, EvInit, EvReadout>;

struct Schedule {
  std::vector<ScheduleEvent> events;
  double total_duration() const;
};

// Stabilization timing: one round is 75 us (three pulses spread over 65 us
// followed by a 10 us repump window); a readout cycle marker closes each pair.
Schedule make_stabilization_schedule(int cycles, int readout_every,
                                     const std::vector<Observable>& obs);
Schedule make_free_decay_schedule(const std::vector<double>& sample_times,
                                  const std::vector<Observable>& obs);

struct ReadoutRecord {
  double t;
  int cycle;
  Observable obs;
  double value;
};

struct TrajectoryResult {
  std::uint64_t seed = 0;
  std::vector<ReadoutRecord> records;
  std::vector<JumpRecord> jumps;
  std::vector<int> branch_choices;  // repump outcomes per round (sampled mode)
};

struct ProtocolParams {
  StabilizationParams stab;
  double init_eps = 0.06 * kSqrtPi;
  double readout_eps_logical = 0;
  double readout_eps_stabilizer = 0;
  int shots = 0;
  bool frame_corrected = true;
  double dt = 1e-6;
};

// Runs one trajectory from `initial`. Noise realization (mains phases, drift)
// is drawn from the trajectory seed; pulses and repump branch choices share
// the same stream.
TrajectoryResult run_trajectory(const FockEngine& eng, const Schedule& schedule,
                                const HybridState& initial, const ProtocolParams& params,
                                const NoiseModel& noise, std::uint64_t seed);

struct CurvePoint {
  double t = 0;
  int cycle = 0;
  Observable obs = Observable::Sz;
  double mean = 0;
  double stderr_ = 0;
  int n = 0;
};

struct EnsembleResult {
  std::vector<CurvePoint> curve;  // ordered as emitted by the trajectory
};

// Embarrassingly parallel over trajectories; per-trajectory streams are
// derived from (master_seed, index) and the reduction is done in index order,
// so results do not depend on the thread count.
EnsembleResult run_ensemble(const FockEngine& eng, const Schedule& schedule,
                            const HybridState& initial, const ProtocolParams& params,
                            const NoiseModel& noise, int n_traj,
                            std::uint64_t master_seed, int threads);

}  // namespace gkp
