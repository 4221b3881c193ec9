#include "gkp/scenarios.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "gkp/analytic.hpp"
#include "gkp/mcwf.hpp"
#include "gkp/version.hpp"
#include "json.hpp"

namespace gkp {

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

struct Row {
  std::vector<std::string> cells;
};

std::string make_csv(const std::vector<std::string>& header, const std::vector<Row>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.cells.size(); ++i)
      os << r.cells[i] << (i + 1 < r.cells.size() ? "," : "\n");
  return os.str();
}

std::string fd(double v) { return format_double(v); }

struct Setup {
  FockEngine eng;
  CodeSpec code;
  NoiseModel noise;
  ProtocolParams params;

  explicit Setup(const ScenarioConfig& cfg)
      : eng(FockConfig{cfg.dim, cfg.tail_tol}),
        code(make_code(cfg.code, cfg.kappa_effective())),
        noise(cfg.noise_model()) {
    params.stab.code = code;
    params.stab.eps = cfg.stab_eps;
    params.stab.mu = cfg.stab_mu;
    params.stab.eps_offset = cfg.stab_eps_offset;
    params.stab.recoil_enabled = cfg.noise_enabled && cfg.recoil_enabled;
    params.stab.recoil = &noise.recoil;
    params.stab.max_branches = 2000;
    params.init_eps = cfg.init_eps;
    params.shots = cfg.readout_shots;
    params.dt = cfg.dt_us * 1e-6;
    const double k = cfg.kappa_effective();
    params.readout_eps_logical = cfg.readout_eps_auto
                                     ? optimize_epsilon(EpsObjective::readout_k1, k)
                                     : cfg.readout_eps_logical;
    params.readout_eps_stabilizer = cfg.readout_eps_auto
                                        ? optimize_epsilon(EpsObjective::readout_k2, k)
                                        : cfg.readout_eps_stabilizer;
  }

  int threads(const ScenarioConfig& cfg) const {
    if (cfg.threads > 0) return cfg.threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
  }
};

Eigenstate parse_eigenstate(const std::string& s) {
  Eigenstate e;
  e.sign = s[0] == '+' ? 1 : -1;
  e.axis = s[1] == 'x' ? LogicalAxis::X : (s[1] == 'y' ? LogicalAxis::Y : LogicalAxis::Z);
  return e;
}

Observable axis_observable(LogicalAxis a) {
  switch (a) {
    case LogicalAxis::X: return Observable::Lx;
    case LogicalAxis::Y: return Observable::Ly;
    default: return Observable::Lz;
  }
}

constexpr double kCycleSeconds = 150e-6;
constexpr double kSweepExposureSeconds = 75e-6;

// Noiseless deterministic pump from vacuum with exact branching.
OscEnsemble exact_pump(const Setup& su, int cycles, Rng& rng) {
  OscEnsemble ens = OscEnsemble::pure(su.eng.vacuum());
  StabilizationParams p = su.params.stab;
  p.recoil_enabled = false;
  for (int c = 0; c < cycles; ++c) {
    stabilization_round(su.eng, ens, 1, p, BranchMode::exact_branching, rng);
    stabilization_round(su.eng, ens, 2, p, BranchMode::exact_branching, rng);
  }
  return ens;
}

}  // namespace

std::vector<CsvFile> scenario_epsilon_sweep(const ScenarioConfig& cfg) {
  Setup su(cfg);
  const double kap = cfg.kappa_effective();

  std::vector<double> grid = cfg.sweep_eps;
  if (grid.empty()) {
    for (int i = 0; i < cfg.sweep_count; ++i)
      grid.push_back(cfg.sweep_eps_min +
                     (cfg.sweep_eps_max - cfg.sweep_eps_min) * i /
                         std::max(1, cfg.sweep_count - 1));
  }

  PrepResult prep = run_prep(su.eng, su.code, {LogicalAxis::Z, -1}, cfg.squeeze_r());
  HybridState ideal1 = ideal_gkp_state(su.eng, su.code, 1);

  std::vector<Row> rows;
  for (int k : cfg.sweep_ks) {
    if (k != 1 && k != 2) throw ConfigError("sweep.ks entries must be 1 or 2");
    for (double eps : grid) {
      MeasurementSpec spec =
          k == 1 ? make_logical_measurement(su.code, LogicalAxis::Z, eps,
                                            MeasureBasis::readout, cfg.stab_eps_offset)
                 : make_stabilizer_measurement(su.code, 0, eps, MeasureBasis::readout,
                                               cfg.stab_eps_offset);
      const double analytic = readout_biased(k, kap, spec.effective_eps(), 1);
      double value = 0, err = 0;
      if (!cfg.noise_enabled) {
        value = finite_measure(su.eng, ideal1, spec).value();
      } else {
        // Deterministic prep followed by one round of noise exposure before
        // the measurement pulses.
        Schedule sch;
        sch.events.push_back(EvFree{kSweepExposureSeconds});
        sch.events.push_back(EvReadout{{k == 1 ? Observable::Lz : Observable::Sz}});
        ProtocolParams pp = su.params;
        (k == 1 ? pp.readout_eps_logical : pp.readout_eps_stabilizer) = spec.effective_eps();
        EnsembleResult er = run_ensemble(su.eng, sch, prep.state, pp, su.noise, cfg.traj,
                                         cfg.seed + k, su.threads(cfg));
        value = er.curve[0].mean;
        err = er.curve[0].stderr_;
      }
      rows.push_back({{std::to_string(k), fd(eps), fd(value), fd(err), fd(analytic)}});
    }
  }
  return {{"epsilon_sweep", make_csv({"k", "eps", "value", "stderr", "analytic"}, rows)}};
}

std::vector<CsvFile> scenario_stabilizer_onset(const ScenarioConfig& cfg) {
  Setup su(cfg);
  std::vector<Row> rows;
  if (cfg.mode == "exact") {
    if (cfg.noise_enabled)
      throw ConfigError("exact mode onset requires noise.enabled = false");
    Rng rng(cfg.seed);
    OscEnsemble ens = OscEnsemble::pure(su.eng.vacuum());
    StabilizationParams p = su.params.stab;
    p.recoil_enabled = false;
    auto record = [&](int cycle) {
      double sz = stabilizer_readout(su.eng, ens, su.code, 0, su.params.readout_eps_stabilizer);
      double sx = stabilizer_readout(su.eng, ens, su.code, 1, su.params.readout_eps_stabilizer);
      rows.push_back({{std::to_string(cycle), fd(sz), "0", fd(sx), "0"}});
    };
    record(0);
    for (int c = 1; c <= cfg.cycles; ++c) {
      stabilization_round(su.eng, ens, 1, p, BranchMode::exact_branching, rng);
      stabilization_round(su.eng, ens, 2, p, BranchMode::exact_branching, rng);
      record(c);
    }
  } else {
    Schedule sch = make_stabilization_schedule(cfg.cycles, cfg.readout_every,
                                               {Observable::Sz, Observable::Sx});
    EnsembleResult er = run_ensemble(su.eng, sch, su.eng.vacuum(), su.params, su.noise,
                                     cfg.traj, cfg.seed, su.threads(cfg));
    for (std::size_t i = 0; i + 1 < er.curve.size(); i += 2) {
      const auto& z = er.curve[i];
      const auto& x = er.curve[i + 1];
      rows.push_back(
          {{std::to_string(z.cycle), fd(z.mean), fd(z.stderr_), fd(x.mean), fd(x.stderr_)}});
    }
  }
  return {{"stabilizer_onset", make_csv({"cycle", "Sz", "Sz_err", "Sx", "Sx_err"}, rows)}};
}

std::vector<CsvFile> scenario_lifetimes(const ScenarioConfig& cfg) {
  Setup su(cfg);
  std::vector<Row> curve_rows;
  std::vector<Row> fit_rows;

  std::vector<double> free_times;
  for (double ms : cfg.times_ms) free_times.push_back(ms * 1e-3);
  if (free_times.empty())
    free_times = {0,      0.2e-3, 0.4e-3, 0.7e-3, 1.0e-3, 1.4e-3,
                  1.9e-3, 2.5e-3, 3.2e-3, 4.0e-3, 5.0e-3, 6.0e-3};

  auto fit_and_record = [&](const std::string& arm, const std::string& label,
                            Observable obs, const std::vector<double>& ts,
                            const std::vector<double>& ys, bool fix_a) {
    FitResult f;
    bool ok = true;
    try {
      f = fit_exp_decay(ts, ys, fix_a);
    } catch (const Error&) {
      ok = false;
    }
    fit_rows.push_back({{arm, label, observable_name(obs), fd(f.a), fd(f.b), fd(f.gamma),
                         fd(f.da), fd(f.db), fd(f.dgamma),
                         fd(f.gamma > 0 ? 1e3 / f.gamma : 0),
                         (ok && f.converged && !f.gamma_indeterminate) ? "1" : "0"}});
  };

  for (const auto& label : cfg.eigenstates) {
    Eigenstate es = parse_eigenstate(label);
    Observable own = axis_observable(es.axis);
    PrepResult prep = run_prep(su.eng, su.code, es, cfg.squeeze_r());

    if (cfg.lifetime_stabilized != "on") {
      // Free decay: logical plus both stabilizers.
      Schedule sch = make_free_decay_schedule(free_times,
                                              {own, Observable::Sz, Observable::Sx});
      EnsembleResult er = run_ensemble(su.eng, sch, prep.state, su.params, su.noise,
                                       cfg.traj, cfg.seed + 17, su.threads(cfg));
      std::vector<double> ts, own_v, sz_v, sx_v;
      for (std::size_t i = 0; i + 2 < er.curve.size(); i += 3) {
        const auto& a = er.curve[i];
        const auto& b = er.curve[i + 1];
        const auto& c = er.curve[i + 2];
        curve_rows.push_back({{"free", label, observable_name(a.obs), fd(a.t * 1e3),
                               std::to_string(a.cycle), fd(a.mean), fd(a.stderr_)}});
        curve_rows.push_back({{"free", label, observable_name(b.obs), fd(b.t * 1e3),
                               std::to_string(b.cycle), fd(b.mean), fd(b.stderr_)}});
        curve_rows.push_back({{"free", label, observable_name(c.obs), fd(c.t * 1e3),
                               std::to_string(c.cycle), fd(c.mean), fd(c.stderr_)}});
        ts.push_back(a.t);
        own_v.push_back(es.sign * a.mean);
        sz_v.push_back(b.mean);
        sx_v.push_back(c.mean);
      }
      fit_and_record("free", label, own, ts, own_v, false);
      fit_and_record("free", label, Observable::Sz, ts, sz_v, false);
      fit_and_record("free", label, Observable::Sx, ts, sx_v, false);
    }

    if (cfg.lifetime_stabilized != "off") {
      Schedule sch = make_stabilization_schedule(cfg.cycles, cfg.readout_every, {own});
      EnsembleResult er = run_ensemble(su.eng, sch, prep.state, su.params, su.noise,
                                       cfg.traj, cfg.seed + 23, su.threads(cfg));
      std::vector<double> ts, ys;
      for (const auto& pt : er.curve) {
        curve_rows.push_back({{"stab", label, observable_name(pt.obs), fd(pt.t * 1e3),
                               std::to_string(pt.cycle), fd(pt.mean), fd(pt.stderr_)}});
        ts.push_back(pt.t);
        ys.push_back(es.sign * pt.mean);
      }
      fit_and_record("stab", label, own, ts, ys, /*fix_a=*/true);
    }
  }

  return {{"lifetime_curves",
           make_csv({"arm", "eigenstate", "observable", "t_ms", "cycle", "value", "stderr"},
                    curve_rows)},
          {"lifetime_fits",
           make_csv({"arm", "eigenstate", "observable", "a", "b", "gamma", "a_err", "b_err",
                     "gamma_err", "tau_ms", "converged"},
                    fit_rows)}};
}

std::vector<CsvFile> scenario_logical_init(const ScenarioConfig& cfg) {
  Setup su(cfg);
  std::vector<Row> rows;

  if (!cfg.noise_enabled && cfg.mode == "exact") {
    Rng rng(cfg.seed);
    OscEnsemble pumped = exact_pump(su, std::min(cfg.cycles, 6), rng);
    for (const auto& label : cfg.eigenstates) {
      Eigenstate es = parse_eigenstate(label);
      OscEnsemble ens = pumped;
      PauliFrame frame;
      StabilizationParams p = su.params.stab;
      p.recoil_enabled = false;
      Rng r2(cfg.seed + 1);
      logical_init(su.eng, ens, es, cfg.init_eps, p, BranchMode::exact_branching, r2, &frame);
      for (LogicalAxis ax : {LogicalAxis::X, LogicalAxis::Y, LogicalAxis::Z}) {
        double v = logical_readout(su.eng, ens, su.code, ax, su.params.readout_eps_logical,
                                   frame);
        rows.push_back({{label, observable_name(axis_observable(ax)), fd(v), "0"}});
      }
    }
  } else {
    for (const auto& label : cfg.eigenstates) {
      Eigenstate es = parse_eigenstate(label);
      Schedule sch = make_stabilization_schedule(std::min(cfg.cycles, 6), 0, {});
      sch.events.push_back(EvInit{es});
      sch.events.push_back(
          EvReadout{{Observable::Lx, Observable::Ly, Observable::Lz}});
      EnsembleResult er = run_ensemble(su.eng, sch, su.eng.vacuum(), su.params, su.noise,
                                       cfg.traj, cfg.seed + 31, su.threads(cfg));
      for (const auto& pt : er.curve)
        rows.push_back({{label, observable_name(pt.obs), fd(pt.mean), fd(pt.stderr_)}});
    }
  }
  return {{"logical_init",
           make_csv({"eigenstate", "observable", "value", "stderr"}, rows)}};
}

std::vector<CsvFile> scenario_charfn(const ScenarioConfig& cfg) {
  Setup su(cfg);
  HybridState state = su.eng.vacuum();
  if (cfg.charfn_state == "ideal0") {
    state = ideal_gkp_state(su.eng, su.code, 0);
  } else if (cfg.charfn_state == "ideal1") {
    state = ideal_gkp_state(su.eng, su.code, 1);
  } else if (cfg.charfn_state == "prep") {
    state = run_prep(su.eng, su.code, {LogicalAxis::Z, -1}, cfg.squeeze_r()).state;
  } else if (cfg.charfn_state == "pumped") {
    Rng rng(cfg.seed);
    OscEnsemble ens = exact_pump(su, std::min(cfg.cycles, 6), rng);
    // Char function of the dominant branch.
    std::size_t best = 0;
    for (std::size_t i = 1; i < ens.branches.size(); ++i)
      if (ens.branches[i].weight > ens.branches[best].weight) best = i;
    state = ens.branches[best].state;
  }

  std::vector<DisplacementExponent> grid;
  const int P = cfg.charfn_points;
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j)
      grid.push_back({-cfg.charfn_extent + 2 * cfg.charfn_extent * i / (P - 1),
                      -cfg.charfn_extent + 2 * cfg.charfn_extent * j / (P - 1)});
  auto vals = su.eng.characteristic_function(state, grid);
  std::vector<Row> rows;
  for (std::size_t i = 0; i < grid.size(); ++i)
    rows.push_back(
        {{fd(grid[i].cq), fd(grid[i].cp), fd(vals[i].real()), fd(vals[i].imag())}});
  return {{"charfn", make_csv({"cq", "cp", "re", "im"}, rows)}};
}

std::vector<CsvFile> run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  if (cfg.scenario == "epsilon_sweep") return scenario_epsilon_sweep(cfg);
  if (cfg.scenario == "stabilizer_onset") return scenario_stabilizer_onset(cfg);
  if (cfg.scenario == "lifetimes") return scenario_lifetimes(cfg);
  if (cfg.scenario == "logical_init") return scenario_logical_init(cfg);
  if (cfg.scenario == "charfn") return scenario_charfn(cfg);
  throw ConfigError("unknown scenario '" + cfg.scenario + "'");
}

std::vector<std::string> write_outputs(const ScenarioConfig& cfg,
                                       const std::vector<CsvFile>& files) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> paths;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%FT%TZ", std::gmtime(&tt));

  for (const auto& f : files) {
    fs::path csv = fs::path(cfg.out_dir) / (cfg.out_prefix + f.name + ".csv");
    std::ofstream(csv, std::ios::binary) << f.body;
    paths.push_back(csv.string());

    nlohmann::json side;
    side["config"] = nlohmann::json::parse(config_to_json(cfg));
    side["master_seed"] = cfg.seed;
    side["version"] = kVersion;
    side["wall_clock"] = stamp;
    side["csv"] = csv.filename().string();
    fs::path js = fs::path(cfg.out_dir) / (cfg.out_prefix + f.name + ".json");
    std::ofstream(js, std::ios::binary) << side.dump(2) << "\n";
    paths.push_back(js.string());
  }
  return paths;
}

}  // namespace gkp
