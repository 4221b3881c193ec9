#include "gkp/mcwf.hpp"

#include <algorithm>
#include <thread>

namespace gkp {

NoiseContext NoiseContext::draw(const NoiseModel& model, Rng& rng) {
  NoiseContext ctx;
  ctx.model = &model;
  if (model.enabled) {
    ctx.mains_phases = draw_mains_phases(rng, model.mains);
    ctx.drift = sample_drift(rng, model.drift_sigma);
  }
  return ctx;
}

NoiseContext NoiseContext::off() { return NoiseContext{}; }

double NoiseContext::detuning(double t) const {
  if (!model || !model->enabled) return 0;
  return mains_delta(t, model->mains, mains_phases) + drift;
}

double NoiseContext::phase_integral(double t0, double t1) const {
  if (!model || !model->enabled) return 0;
  const auto& m = model->mains;
  double phi = drift * (t1 - t0);
  double mains_part = 0;
  for (std::size_t i = 0; i < m.freqs_hz.size(); ++i) {
    const double w = 2 * M_PI * m.freqs_hz[i];
    mains_part += 2 * M_PI * m.amps_hz[i] / w *
                  (std::cos(w * t0 + mains_phases[i]) - std::cos(w * t1 + mains_phases[i]));
  }
  if (m.half_factor) mains_part *= 0.5;
  return phi + mains_part;
}

namespace {

// ‖aψ‖², ‖a†ψ‖², ‖nψ‖² over both ancilla components.
void jump_weights(const HybridState& s, double w[3]) {
  const int N = s.dim;
  w[0] = w[1] = w[2] = 0;
  for (int anc = 0; anc < 2; ++anc) {
    auto osc = s.osc(anc);
    for (int n = 0; n < N; ++n) {
      const double pn = std::norm(osc[n]);
      w[0] += n * pn;
      w[1] += (n + 1) * pn;
      w[2] += double(n) * n * pn;
    }
  }
}

void apply_jump(HybridState& s, int channel) {
  const int N = s.dim;
  for (int anc = 0; anc < 2; ++anc) {
    auto osc = s.osc(anc);
    switch (channel) {
      case 0:  // a
        for (int n = 0; n < N - 1; ++n) osc[n] = std::sqrt(double(n + 1)) * osc[n + 1];
        osc[N - 1] = 0;
        break;
      case 1:  // a†
        for (int n = N - 1; n >= 1; --n) osc[n] = std::sqrt(double(n)) * osc[n - 1];
        osc[0] = 0;
        break;
      case 2:  // a†a
        for (int n = 0; n < N; ++n) osc[n] *= double(n);
        break;
    }
  }
  s.normalize();
}

struct DecayTable {
  // exp(−(dt/2)(γ↓ n + γ↑(n+1) + γφ n²)) per Fock level.
  std::vector<double> half_decay;
  double g_down = 0, g_up = 0, g_deph = 0;
  bool any = false;

  void build(const NoiseModel* model, int N, double dt) {
    half_decay.assign(N, 1.0);
    if (!model || !model->enabled) return;
    g_down = model->gamma_down;
    g_up = model->gamma_up;
    g_deph = model->gamma_deph;
    any = g_down > 0 || g_up > 0 || g_deph > 0;
    for (int n = 0; n < N; ++n) {
      const double rate = g_down * n + g_up * (n + 1) + g_deph * double(n) * n;
      half_decay[n] = std::exp(-0.5 * rate * dt);
    }
  }
};

void evolve_step(HybridState& s, double t, double dt, const NoiseContext& ctx,
                 const DecayTable& tab, Rng& rng, std::vector<JumpRecord>* log,
                 int depth) {
  const int N = s.dim;
  double pj = 0;
  double w[3] = {0, 0, 0};
  if (tab.any) {
    jump_weights(s, w);
    pj = (tab.g_down * w[0] + tab.g_up * w[1] + tab.g_deph * w[2]) * dt;
  }
  if (pj > 0.05) {
    if (depth > 24) throw StepSizeError("jump probability per step stays above 0.05");
    DecayTable half = tab;
    half.build(ctx.model, N, dt / 2);
    evolve_step(s, t, dt / 2, ctx, half, rng, log, depth + 1);
    evolve_step(s, t + dt / 2, dt / 2, ctx, half, rng, log, depth + 1);
    return;
  }

  std::uniform_real_distribution<double> u(0, 1);
  if (tab.any && u(rng) < pj) {
    const double tot = tab.g_down * w[0] + tab.g_up * w[1] + tab.g_deph * w[2];
    double r = u(rng) * tot;
    int ch = 0;
    if (r < tab.g_down * w[0]) {
      ch = 0;
    } else if (r < tab.g_down * w[0] + tab.g_up * w[1]) {
      ch = 1;
    } else {
      ch = 2;
    }
    apply_jump(s, ch);
    if (log) log->push_back({t, ch});
    return;
  }

  // Exact no-jump propagator: detuning phase integral plus diagonal decay.
  const double phi = ctx.phase_integral(t, t + dt);
  for (int anc = 0; anc < 2; ++anc) {
    auto osc = s.osc(anc);
    for (int n = 0; n < N; ++n)
      osc[n] *= std::polar(tab.any ? tab.half_decay[n] * tab.half_decay[n] : 1.0,
                           -phi * n);
  }
  s.normalize();
}

}  // namespace

void evolve_segment(const FockEngine& eng, HybridState& state, double t0,
                    double duration, const NoiseContext& ctx, double dt, Rng& rng,
                    std::vector<JumpRecord>* log) {
  if (duration <= 0) return;
  if (dt > duration) dt = duration;
  DecayTable tab;
  tab.build(ctx.model, state.dim, dt);
  const int steps = int(std::ceil(duration / dt - 1e-12));
  const double step = duration / steps;
  if (std::abs(step - dt) > 1e-15) tab.build(ctx.model, state.dim, step);
  if (state.dim != eng.dim()) throw DimensionError("state/engine dimension mismatch");
  for (int i = 0; i < steps; ++i)
    evolve_step(state, t0 + i * step, step, ctx, tab, rng, log, 0);
}

std::string observable_name(Observable o) {
  switch (o) {
    case Observable::Sz: return "Sz";
    case Observable::Sx: return "Sx";
    case Observable::Lx: return "Lx";
    case Observable::Ly: return "Ly";
    case Observable::Lz: return "Lz";
    case Observable::RamseyRe: return "coh_re";
    case Observable::RamseyIm: return "coh_im";
    case Observable::MeanN: return "mean_n";
  }
  return "?";
}

double Schedule::total_duration() const {
  double t = 0;
  for (const auto& e : events)
    if (auto* f = std::get_if<EvFree>(&e)) t += f->duration;
  return t;
}

namespace {
constexpr double kRoundSeconds = 75e-6;
constexpr double kRepumpSeconds = 10e-6;
// Three pulse instants spread over the non-repump part of a round.
constexpr double kPulseGap = (kRoundSeconds - kRepumpSeconds) / 3.0;
}  // namespace

Schedule make_stabilization_schedule(int cycles, int readout_every,
                                     const std::vector<Observable>& obs) {
  Schedule sch;
  sch.events.push_back(EvReadout{obs});
  for (int c = 1; c <= cycles; ++c) {
    for (int r = 1; r <= 2; ++r) {
      sch.events.push_back(EvFree{kPulseGap});
      sch.events.push_back(EvFree{kPulseGap});
      sch.events.push_back(EvFree{kPulseGap});
      sch.events.push_back(EvRound{r});
      sch.events.push_back(EvFree{kRepumpSeconds});
    }
    sch.events.push_back(EvCycleMark{});
    if (readout_every > 0 && c % readout_every == 0) sch.events.push_back(EvReadout{obs});
  }
  return sch;
}

Schedule make_free_decay_schedule(const std::vector<double>& sample_times,
                                  const std::vector<Observable>& obs) {
  Schedule sch;
  double t = 0;
  for (double ts : sample_times) {
    if (ts < t) throw ConfigError("sample times must be nondecreasing");
    if (ts > t) sch.events.push_back(EvFree{ts - t});
    sch.events.push_back(EvReadout{obs});
    t = ts;
  }
  return sch;
}

namespace {

double observe(const FockEngine& eng, const HybridState& s, Observable o,
               const ProtocolParams& params, const PauliFrame& frame, Rng& rng) {
  const CodeSpec& code = params.stab.code;
  OscEnsemble one = OscEnsemble::pure(s);
  Rng* rp = params.shots > 0 ? &rng : nullptr;
  switch (o) {
    case Observable::Sz:
      return stabilizer_readout(eng, one, code, 0, params.readout_eps_stabilizer,
                                params.shots, rp);
    case Observable::Sx:
      return stabilizer_readout(eng, one, code, 1, params.readout_eps_stabilizer,
                                params.shots, rp);
    case Observable::Lx:
    case Observable::Ly:
    case Observable::Lz: {
      LogicalAxis ax = o == Observable::Lx   ? LogicalAxis::X
                       : o == Observable::Ly ? LogicalAxis::Y
                                             : LogicalAxis::Z;
      PauliFrame f = params.frame_corrected ? frame : PauliFrame{};
      return logical_readout(eng, one, code, ax, params.readout_eps_logical, f,
                             params.shots, rp);
    }
    case Observable::RamseyRe:
      return 2.0 * (std::conj(s.amps[0]) * s.amps[1]).real();
    case Observable::RamseyIm:
      return 2.0 * (std::conj(s.amps[0]) * s.amps[1]).imag();
    case Observable::MeanN: {
      double v = 0;
      for (int anc = 0; anc < 2; ++anc)
        for (int n = 0; n < s.dim; ++n) v += n * std::norm(s.amps[anc * s.dim + n]);
      return v;
    }
  }
  return 0;
}

}  // namespace

TrajectoryResult run_trajectory(const FockEngine& eng, const Schedule& schedule,
                                const HybridState& initial, const ProtocolParams& params,
                                const NoiseModel& noise, std::uint64_t seed) {
  Rng rng(seed);
  NoiseContext ctx = NoiseContext::draw(noise, rng);
  TrajectoryResult res;
  res.seed = seed;

  HybridState s = initial;
  OscEnsemble ens = OscEnsemble::pure(std::move(s));
  PauliFrame frame;
  double t = 0;
  int cycle = 0;

  for (const auto& ev : schedule.events) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, EvFree>) {
            evolve_segment(eng, ens.branches[0].state, t, e.duration, ctx, params.dt,
                           rng, &res.jumps);
            t += e.duration;
          } else if constexpr (std::is_same_v<T, EvRound>) {
            int choice = stabilization_round(eng, ens, e.round_index, params.stab,
                                             BranchMode::sampled, rng);
            res.branch_choices.push_back(choice);
          } else if constexpr (std::is_same_v<T, EvCycleMark>) {
            ++cycle;
            frame.apply_cycle_flip();
          } else if constexpr (std::is_same_v<T, EvInit>) {
            logical_init(eng, ens, e.which, params.init_eps, params.stab,
                         BranchMode::sampled, rng, &frame);
          } else if constexpr (std::is_same_v<T, EvReadout>) {
            for (Observable o : e.obs)
              res.records.push_back(
                  {t, cycle, o, observe(eng, ens.branches[0].state, o, params, frame, rng)});
          }
        },
        ev);
  }
  return res;
}

EnsembleResult run_ensemble(const FockEngine& eng, const Schedule& schedule,
                            const HybridState& initial, const ProtocolParams& params,
                            const NoiseModel& noise, int n_traj,
                            std::uint64_t master_seed, int threads) {
  if (n_traj < 1) throw ConfigError("n_traj must be >= 1");
  if (threads < 1) threads = 1;
  std::vector<TrajectoryResult> results(n_traj);

  auto worker = [&](int begin, int stride) {
    for (int i = begin; i < n_traj; i += stride) {
      Rng probe = make_stream_rng(master_seed, std::uint64_t(i));
      results[i] = run_trajectory(eng, schedule, initial, params, noise, probe());
    }
  };
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int th = 0; th < threads; ++th) pool.emplace_back(worker, th, threads);
    for (auto& th : pool) th.join();
  }

  // Reduce in trajectory order; every trajectory emits the same record layout.
  EnsembleResult out;
  const auto& proto = results[0].records;
  out.curve.resize(proto.size());
  for (std::size_t r = 0; r < proto.size(); ++r) {
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n_traj; ++i) {
      const double v = results[i].records[r].value;
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / n_traj;
    double var = n_traj > 1 ? std::max(0.0, (sum2 - n_traj * mean * mean) / (n_traj - 1))
                            : 0.0;
    out.curve[r] = {proto[r].t, proto[r].cycle, proto[r].obs, mean,
                    n_traj > 1 ? std::sqrt(var / n_traj) : 0.0, n_traj};
  }
  return out;
}

}  // namespace gkp
