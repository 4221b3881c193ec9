#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "gkp/fit.hpp"
#include "gkp/scenarios.hpp"
#include "json.hpp"

using namespace gkp;

namespace {
const char* kTinyOnset = R"(
scenario = stabilizer_onset
code.name = square
dim = 160
tail_tol = 1e-3
stabilize.eps = 0.095
stabilize.mu = 0.17
stabilize.eps_offset = 0
run.cycles = 2
run.traj = 6
run.seed = 424242
run.mode = sampled
run.threads = 2
readout.eps_auto = false
readout.eps_logical = 0.12
readout.eps_stabilizer = 0.23
)";

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("config parsing: defaults, errors, round trip") {
  ScenarioConfig c = parse_config_text("scenario = stabilizer_onset\n", "inline");
  CHECK(c.code == "square");
  CHECK(c.squeezing_db == 8.9);
  CHECK(c.kappa_effective() == doctest::Approx(0.3589).epsilon(1e-3));
  CHECK(c.stab_eps == doctest::Approx(0.045 * kTwoSqrtPi));
  CHECK(c.stab_mu == doctest::Approx(0.065 * kTwoSqrtPi));
  CHECK(c.stab_eps_offset == doctest::Approx(0.007 * kTwoSqrtPi));
  CHECK(c.gamma_down == 10.0);
  CHECK(c.gamma_deph == 20.0);
  CHECK(c.mains_amps == std::vector<double>{25, 1, 29, 3, 31});
  CHECK(c.drift_sigma_hz == 6.0);
  CHECK(c.recoil_norm == 0.13);

  // unknown keys are hard errors naming the key
  try {
    parse_config_text("scenario = charfn\nepsilonn = 0.1\n", "inline");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("epsilonn") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config_text("scenario = charfn\ncode.kappa = 1.5\n", "inline"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("scenario = nope\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("scenario = charfn\nscenario = charfn\n", "inline"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("scenario = lifetimes\neigenstates = [+q]\n", "inline"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("scenario = stabilizer_onset\nrun.mode = exact\nrun.cycles = 20\n",
                        "inline"),
      ConfigError);

  // arrays and the JSON dump of the resolved config
  ScenarioConfig l = parse_config_text(
      "scenario = lifetimes\nnoise.mains.amps = [1, 2, 3, 4, 5]\nrun.times_ms = [0, 1.5]\n",
      "inline");
  CHECK(l.mains_amps == std::vector<double>{1, 2, 3, 4, 5});
  CHECK(l.times_ms == std::vector<double>{0, 1.5});
  auto j = nlohmann::json::parse(config_to_json(l));
  CHECK(j["noise.mains.amps"][2] == 3.0);
  CHECK(j["scenario"] == "lifetimes");
}

TEST_CASE("exponential decay fitting") {
  Rng rng(5);
  std::normal_distribution<double> g(0, 0.01);
  std::vector<double> t, y;
  for (int i = 0; i < 20; ++i) {
    t.push_back(i * 2e-3);
    y.push_back(std::exp(-100.0 * t.back()) + g(rng));
  }
  FitResult f = fit_exp_decay(t, y, /*fix_a_zero=*/true);
  CHECK(f.converged);
  CHECK(f.gamma == doctest::Approx(100.0).epsilon(0.05));
  CHECK(f.b == doctest::Approx(1.0).epsilon(0.05));
  CHECK(f.dgamma < 10.0);

  // free baseline
  std::vector<double> y2;
  for (double ti : t) y2.push_back(0.3 + 0.6 * std::exp(-250.0 * ti));
  FitResult f2 = fit_exp_decay(t, y2, false);
  CHECK(f2.a == doctest::Approx(0.3).epsilon(0.02));
  CHECK(f2.gamma == doctest::Approx(250.0).epsilon(0.02));

  // constant data: the rate is indeterminate
  std::vector<double> flat(t.size(), 0.5);
  FitResult f3 = fit_exp_decay(t, flat, false);
  CHECK(f3.gamma_indeterminate);

  CHECK_THROWS_AS(fit_exp_decay({0, 1}, {1, 0.5}, false), ConfigError);
}

TEST_CASE("scenario output is deterministic and matches the golden file") {
  ScenarioConfig cfg = parse_config_text(kTinyOnset, "inline");
  auto files1 = run_scenario(cfg);
  auto files2 = run_scenario(cfg);
  REQUIRE(files1.size() == 1);
  CHECK(files1[0].body == files2[0].body);

  ScenarioConfig one_thread = cfg;
  one_thread.threads = 1;
  auto files3 = run_scenario(one_thread);
  CHECK(files1[0].body == files3[0].body);

  // header schema
  std::istringstream is(files1[0].body);
  std::string header;
  std::getline(is, header);
  CHECK(header == "cycle,Sz,Sz_err,Sx,Sx_err");

  const std::string golden_path = std::string(GKP_TEST_DIR) + "/golden/onset_tiny.csv";
  CHECK(files1[0].body == slurp(golden_path));
}

TEST_CASE("epsilon sweep emits the analytic overlay") {
  ScenarioConfig cfg = parse_config_text(
      "scenario = epsilon_sweep\nnoise.enabled = false\ndim = 220\n"
      "sweep.count = 7\nsweep.ks = [1]\nstabilize.eps_offset = 0\n",
      "inline");
  auto files = run_scenario(cfg);
  REQUIRE(files.size() == 1);
  std::istringstream is(files[0].body);
  std::string line;
  std::getline(is, line);
  CHECK(line == "k,eps,value,stderr,analytic");
  int rows = 0;
  double max_dev = 0;
  while (std::getline(is, line)) {
    ++rows;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int k;
    double eps, value, err, analytic;
    ls >> k >> eps >> value >> err >> analytic;
    CHECK(k == 1);
    max_dev = std::max(max_dev, std::abs(value - analytic));
  }
  CHECK(rows == 7);
  CHECK(max_dev < 0.01);
}

TEST_CASE("noisy bias sweep depresses the readout and reports errors") {
  ScenarioConfig cfg = parse_config_text(
      "scenario = epsilon_sweep\ndim = 220\ntail_tol = 1e-3\n"
      "sweep.eps = [0.2, 0.24, 0.28]\nsweep.ks = [2]\n"
      "stabilize.eps_offset = 0\nrun.traj = 24\nrun.seed = 8\n",
      "inline");
  auto files = run_scenario(cfg);
  std::istringstream is(files[0].body);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int k;
    double eps, value, err, analytic;
    ls >> k >> eps >> value >> err >> analytic;
    CHECK(value < analytic);  // preparation error plus trap noise
    CHECK(value > analytic - 0.25);
    CHECK(err > 0.0);
  }
}

TEST_CASE("noisy pumping settles near the reported plateau") {
  ScenarioConfig cfg = parse_config_text(
      "scenario = stabilizer_onset\ndim = 300\ntail_tol = 5e-4\n"
      "run.cycles = 9\nrun.traj = 220\nrun.seed = 12\n",
      "inline");
  auto files = run_scenario(cfg);
  std::istringstream is(files[0].body);
  std::string line;
  std::getline(is, line);
  double sz = 0, sx = 0;
  int cycle = -1;
  while (std::getline(is, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double e1, e2;
    ls >> cycle >> sz >> e1 >> sx >> e2;
  }
  CHECK(cycle == 9);
  CHECK(sz == doctest::Approx(0.78).epsilon(0.10 / 0.78));
  CHECK(sx == doctest::Approx(0.81).epsilon(0.10 / 0.81));
}

TEST_CASE("characteristic function scenario on the vacuum") {
  ScenarioConfig cfg = parse_config_text(
      "scenario = charfn\ncharfn.state = vacuum\ncharfn.points = 3\n"
      "charfn.extent = 1.0\ndim = 60\n",
      "inline");
  auto files = run_scenario(cfg);
  REQUIRE(files.size() == 1);
  std::istringstream is(files[0].body);
  std::string line;
  std::getline(is, line);
  CHECK(line == "cq,cp,re,im");
  // center point of the 3x3 grid is chi(0,0) = 1
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> r(4);
    ls >> r[0] >> r[1] >> r[2] >> r[3];
    rows.push_back(r);
  }
  REQUIRE(rows.size() == 9);
  CHECK(rows[4][2] == doctest::Approx(1.0));
  CHECK(rows[0][2] == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("lifetime scenario emits curves and fits") {
  ScenarioConfig cfg = parse_config_text(
      "scenario = lifetimes\ndim = 200\ntail_tol = 1e-3\n"
      "stabilize.eps = 0.095\nstabilize.mu = 0.17\nstabilize.eps_offset = 0\n"
      "run.cycles = 6\nrun.readout_every = 2\nrun.traj = 8\nrun.seed = 3\n"
      "run.times_ms = [0.05, 0.3, 0.7, 1.2, 1.8]\neigenstates = [-z]\n"
      "readout.eps_auto = false\nreadout.eps_logical = 0.12\n"
      "readout.eps_stabilizer = 0.23\n",
      "inline");
  auto files = run_scenario(cfg);
  REQUIRE(files.size() == 2);
  CHECK(files[0].name == "lifetime_curves");
  CHECK(files[1].name == "lifetime_fits");
  // free arm: 5 times x 3 observables; stabilized arm: 4 points
  int curve_rows = int(std::count(files[0].body.begin(), files[0].body.end(), '\n')) - 1;
  CHECK(curve_rows == 5 * 3 + 4);
  int fit_rows = int(std::count(files[1].body.begin(), files[1].body.end(), '\n')) - 1;
  CHECK(fit_rows == 4);  // own + Sz + Sx free fits, one stabilized fit
}

TEST_CASE("logical init scenario reads out the prepared eigenstates") {
  ScenarioConfig cfg = parse_config_text(
      "scenario = logical_init\ndim = 220\ntail_tol = 1e-3\n"
      "noise.enabled = false\nnoise.recoil.enabled = false\n"
      "stabilize.eps = 0.095\nstabilize.mu = 0.17\nstabilize.eps_offset = 0\n"
      "run.cycles = 3\nrun.traj = 12\nrun.seed = 5\nrun.mode = sampled\n"
      "eigenstates = [+z, -z]\n",
      "inline");
  auto files = run_scenario(cfg);
  REQUIRE(files.size() == 1);
  std::istringstream is(files[0].body);
  std::string line;
  std::getline(is, line);
  CHECK(line == "eigenstate,observable,value,stderr");
  double plus_z = 0, minus_z = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string label, obs, val, err;
    std::getline(ls, label, ',');
    std::getline(ls, obs, ',');
    std::getline(ls, val, ',');
    if (obs == "Lz") (label == "+z" ? plus_z : minus_z) = std::stod(val);
  }
  CHECK(plus_z > 0.85);
  CHECK(minus_z < -0.85);
}

TEST_CASE("output files carry a sidecar with the resolved configuration") {
  ScenarioConfig cfg = parse_config_text(
      "scenario = charfn\ncharfn.state = vacuum\ncharfn.points = 2\ndim = 40\n"
      "charfn.extent = 0.8\nout.dir = /tmp/gkpsim_test_out\nout.prefix = t_\n",
      "inline");
  auto files = run_scenario(cfg);
  auto paths = write_outputs(cfg, files);
  REQUIRE(paths.size() == 2);
  auto j = nlohmann::json::parse(slurp(paths[1]));
  CHECK(j["master_seed"] == cfg.seed);
  CHECK(j["config"]["dim"] == 40);
  CHECK(std::string(j["version"]).find("gkpsim") != std::string::npos);
  CHECK(slurp(paths[0]) == files[0].body);
}
