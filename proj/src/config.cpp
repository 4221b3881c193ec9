#include "gkp/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace gkp {

NoiseModel ScenarioConfig::noise_model() const {
  NoiseModel m;
  m.enabled = noise_enabled;
  m.gamma_down = gamma_down;
  m.gamma_up = gamma_up;
  m.gamma_deph = gamma_deph;
  m.mains.freqs_hz = mains_freqs;
  m.mains.amps_hz = mains_amps;
  m.mains.phases = mains_phases;
  m.mains.line_trigger = line_trigger;
  m.mains.half_factor = mains_half;
  m.drift_sigma = 2 * M_PI * drift_sigma_hz;
  m.recoil_enabled = recoil_enabled;
  m.recoil.mean_photons = recoil_mean_photons;
  m.recoil.kick_norm = recoil_norm;
  m.recoil.calibrate();
  m.validate();
  return m;
}

void ScenarioConfig::validate() const {
  static const std::vector<std::string> known_scenarios{
      "epsilon_sweep", "stabilizer_onset", "lifetimes", "logical_init", "charfn"};
  if (std::find(known_scenarios.begin(), known_scenarios.end(), scenario) ==
      known_scenarios.end())
    throw ConfigError("unknown scenario '" + scenario + "'");
  if (code != "square" && code != "hexagonal" && code != "hex")
    throw ConfigError("unknown code '" + code + "'");
  const double k = kappa_effective();
  if (!(k > 0 && k < 1)) throw ConfigError("kappa must lie in (0,1)");
  if (dim < 2) throw ConfigError("dim must be >= 2");
  if (!(tail_tol > 0 && tail_tol < 1)) throw ConfigError("tail_tol must lie in (0,1)");
  if (traj < 1) throw ConfigError("run.traj must be >= 1");
  if (cycles < 0) throw ConfigError("run.cycles must be >= 0");
  if (mode != "exact" && mode != "sampled") throw ConfigError("run.mode must be exact|sampled");
  if (mode == "exact" && cycles > 12)
    throw ConfigError("exact branching is limited to 12 cycles; use run.mode = sampled");
  if (dt_us <= 0) throw ConfigError("run.dt_us must be positive");
  if (stab_eps < 0 || stab_mu < 0) throw ConfigError("stabilize amplitudes must be >= 0");
  if (readout_shots < 0) throw ConfigError("readout.shots must be >= 0");
  for (const auto& e : eigenstates)
    if (e.size() != 2 || (e[0] != '+' && e[0] != '-') ||
        (e[1] != 'x' && e[1] != 'y' && e[1] != 'z'))
      throw ConfigError("bad eigenstate label '" + e + "' (use ±x, ±y, ±z)");
  if (lifetime_stabilized != "on" && lifetime_stabilized != "off" &&
      lifetime_stabilized != "both")
    throw ConfigError("lifetime.stabilized must be on|off|both");
  if (charfn_points < 2) throw ConfigError("charfn.points must be >= 2");
  const std::vector<std::string> states{"vacuum", "ideal0", "ideal1", "prep", "pumped"};
  if (std::find(states.begin(), states.end(), charfn_state) == states.end())
    throw ConfigError("unknown charfn.state '" + charfn_state + "'");
}

namespace {

struct RawEntry {
  std::string value;
  int line;
  bool used = false;
};

using RawMap = std::map<std::string, RawEntry>;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (...) {
    throw ConfigError("key '" + key + "' (line " + std::to_string(line) +
                      "): expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "' (line " + std::to_string(line) +
                    "): expected a boolean, got '" + v + "'");
}

std::vector<std::string> parse_list(const std::string& v, const std::string& key, int line) {
  std::string s = trim(v);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']')
    throw ConfigError("key '" + key + "' (line " + std::to_string(line) +
                      "): expected a [..] list");
  s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Binder {
 public:
  Binder(RawMap& raw) : raw_(raw) {}

  void number(const std::string& key, double& field) {
    if (auto* e = find(key)) field = parse_number(e->value, key, e->line);
  }
  void integer(const std::string& key, int& field) {
    if (auto* e = find(key)) field = int(parse_number(e->value, key, e->line));
  }
  void uinteger(const std::string& key, std::uint64_t& field) {
    if (auto* e = find(key)) field = std::uint64_t(parse_number(e->value, key, e->line));
  }
  void boolean(const std::string& key, bool& field) {
    if (auto* e = find(key)) field = parse_bool(e->value, key, e->line);
  }
  void text(const std::string& key, std::string& field) {
    if (auto* e = find(key)) field = e->value;
  }
  void numbers(const std::string& key, std::vector<double>& field) {
    if (auto* e = find(key)) {
      field.clear();
      for (const auto& s : parse_list(e->value, key, e->line))
        field.push_back(parse_number(s, key, e->line));
    }
  }
  void integers(const std::string& key, std::vector<int>& field) {
    if (auto* e = find(key)) {
      field.clear();
      for (const auto& s : parse_list(e->value, key, e->line))
        field.push_back(int(parse_number(s, key, e->line)));
    }
  }
  void texts(const std::string& key, std::vector<std::string>& field) {
    if (auto* e = find(key)) field = parse_list(e->value, key, e->line);
  }

 private:
  RawEntry* find(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  RawMap& raw_;
};

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
  RawMap raw;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + " line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + " line " + std::to_string(lineno) + ": empty key");
    if (raw.count(key))
      throw ConfigError(origin + " line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    raw[key] = {value, lineno, false};
  }

  ScenarioConfig c;
  Binder b(raw);
  b.text("scenario", c.scenario);
  b.text("code.name", c.code);
  b.number("code.kappa", c.kappa);
  b.number("squeezing_db", c.squeezing_db);
  b.integer("dim", c.dim);
  b.number("tail_tol", c.tail_tol);
  b.number("stabilize.eps", c.stab_eps);
  b.number("stabilize.mu", c.stab_mu);
  b.number("stabilize.eps_offset", c.stab_eps_offset);
  b.boolean("readout.eps_auto", c.readout_eps_auto);
  b.number("readout.eps_logical", c.readout_eps_logical);
  b.number("readout.eps_stabilizer", c.readout_eps_stabilizer);
  b.integer("readout.shots", c.readout_shots);
  b.number("init.eps", c.init_eps);
  b.integer("run.cycles", c.cycles);
  b.integer("run.traj", c.traj);
  b.uinteger("run.seed", c.seed);
  b.text("run.mode", c.mode);
  b.integer("run.threads", c.threads);
  b.number("run.dt_us", c.dt_us);
  b.integer("run.readout_every", c.readout_every);
  b.numbers("run.times_ms", c.times_ms);
  b.boolean("noise.enabled", c.noise_enabled);
  b.number("noise.gamma_down", c.gamma_down);
  b.number("noise.gamma_up", c.gamma_up);
  b.number("noise.gamma_deph", c.gamma_deph);
  b.numbers("noise.mains.freqs", c.mains_freqs);
  b.numbers("noise.mains.amps", c.mains_amps);
  b.numbers("noise.mains.phases", c.mains_phases);
  b.boolean("noise.line_trigger", c.line_trigger);
  b.boolean("noise.mains_half", c.mains_half);
  b.number("noise.drift_sigma_hz", c.drift_sigma_hz);
  b.boolean("noise.recoil.enabled", c.recoil_enabled);
  b.number("noise.recoil.mean_photons", c.recoil_mean_photons);
  b.number("noise.recoil.norm", c.recoil_norm);
  b.numbers("sweep.eps", c.sweep_eps);
  b.number("sweep.eps_min", c.sweep_eps_min);
  b.number("sweep.eps_max", c.sweep_eps_max);
  b.integer("sweep.count", c.sweep_count);
  b.integers("sweep.ks", c.sweep_ks);
  b.texts("eigenstates", c.eigenstates);
  b.text("lifetime.stabilized", c.lifetime_stabilized);
  b.number("charfn.extent", c.charfn_extent);
  b.integer("charfn.points", c.charfn_points);
  b.text("charfn.state", c.charfn_state);
  b.text("out.dir", c.out_dir);
  b.text("out.prefix", c.out_prefix);

  for (const auto& [key, entry] : raw)
    if (!entry.used)
      throw ConfigError(origin + " line " + std::to_string(entry.line) +
                        ": unknown key '" + key + "'");

  if (c.mains_phases.size() != c.mains_freqs.size())
    c.mains_phases.assign(c.mains_freqs.size(), 0.0);
  c.validate();
  return c;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string config_to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["scenario"] = c.scenario;
  j["code.name"] = c.code;
  j["code.kappa"] = c.kappa_effective();
  j["squeezing_db"] = c.squeezing_db;
  j["dim"] = c.dim;
  j["tail_tol"] = c.tail_tol;
  j["stabilize.eps"] = c.stab_eps;
  j["stabilize.mu"] = c.stab_mu;
  j["stabilize.eps_offset"] = c.stab_eps_offset;
  j["readout.eps_auto"] = c.readout_eps_auto;
  j["readout.eps_logical"] = c.readout_eps_logical;
  j["readout.eps_stabilizer"] = c.readout_eps_stabilizer;
  j["readout.shots"] = c.readout_shots;
  j["init.eps"] = c.init_eps;
  j["run.cycles"] = c.cycles;
  j["run.traj"] = c.traj;
  j["run.seed"] = c.seed;
  j["run.mode"] = c.mode;
  j["run.threads"] = c.threads;
  j["run.dt_us"] = c.dt_us;
  j["run.readout_every"] = c.readout_every;
  j["run.times_ms"] = c.times_ms;
  j["noise.enabled"] = c.noise_enabled;
  j["noise.gamma_down"] = c.gamma_down;
  j["noise.gamma_up"] = c.gamma_up;
  j["noise.gamma_deph"] = c.gamma_deph;
  j["noise.mains.freqs"] = c.mains_freqs;
  j["noise.mains.amps"] = c.mains_amps;
  j["noise.mains.phases"] = c.mains_phases;
  j["noise.line_trigger"] = c.line_trigger;
  j["noise.mains_half"] = c.mains_half;
  j["noise.drift_sigma_hz"] = c.drift_sigma_hz;
  j["noise.recoil.enabled"] = c.recoil_enabled;
  j["noise.recoil.mean_photons"] = c.recoil_mean_photons;
  j["noise.recoil.norm"] = c.recoil_norm;
  j["sweep.eps"] = c.sweep_eps;
  j["sweep.eps_min"] = c.sweep_eps_min;
  j["sweep.eps_max"] = c.sweep_eps_max;
  j["sweep.count"] = c.sweep_count;
  j["sweep.ks"] = c.sweep_ks;
  j["eigenstates"] = c.eigenstates;
  j["lifetime.stabilized"] = c.lifetime_stabilized;
  j["charfn.extent"] = c.charfn_extent;
  j["charfn.points"] = c.charfn_points;
  j["charfn.state"] = c.charfn_state;
  j["out.dir"] = c.out_dir;
  j["out.prefix"] = c.out_prefix;
  return j.dump(2);
}

}  // namespace gkp
