#include "gkp/noise.hpp"

namespace gkp {

void MainsModel::validate() const {
  if (freqs_hz.size() != amps_hz.size() || freqs_hz.size() != phases.size())
    throw ConfigError("mains: freqs/amps/phases must have equal lengths");
  for (double f : freqs_hz)
    if (f <= 0) throw ConfigError("mains: frequencies must be positive");
}

void NoiseModel::validate() const {
  if (gamma_down < 0 || gamma_up < 0 || gamma_deph < 0)
    throw ConfigError("noise: rates must be nonnegative");
  if (drift_sigma < 0) throw ConfigError("noise: drift width must be nonnegative");
  mains.validate();
}

void RecoilModel::calibrate() {
  if (kick_norm == 0 || mean_photons <= 0) {
    kick_per_photon = 0;
    return;
  }
  // E[‖δ‖] = kick_per_photon · E[R_N] with R_N the N-step unit random walk
  // norm; E[R_N] is estimated once with a fixed internal stream.
  Rng rng(0x9d2c5680u);
  std::uniform_real_distribution<double> uphase(0, 2 * M_PI);
  const double p0 = 1.0 / (1.0 + mean_photons);
  std::geometric_distribution<int> gn(p0);
  const int samples = 400000;
  double acc = 0;
  for (int i = 0; i < samples; ++i) {
    int n = gn(rng);
    double x = 0, y = 0;
    for (int j = 0; j < n; ++j) {
      double ph = (angles == RecoilAngles::isotropic_projected) ? uphase(rng) : 0.0;
      x += std::cos(ph);
      y += std::sin(ph);
    }
    acc += std::hypot(x, y);
  }
  const double mean_walk = acc / samples;
  kick_per_photon = kick_norm / mean_walk;
}

double mains_delta(double t, const MainsModel& m, const std::vector<double>& phases) {
  double d = 0;
  for (std::size_t i = 0; i < m.freqs_hz.size(); ++i)
    d += m.amps_hz[i] * std::sin(2 * M_PI * m.freqs_hz[i] * t + phases[i]);
  d *= 2 * M_PI;
  return m.half_factor ? 0.5 * d : d;
}

std::vector<double> draw_mains_phases(Rng& rng, const MainsModel& m) {
  if (m.line_trigger) return m.phases;
  std::uniform_real_distribution<double> u(0, 2 * M_PI);
  std::vector<double> out(m.freqs_hz.size());
  for (auto& p : out) p = u(rng);
  return out;
}

double sample_drift(Rng& rng, double sigma) {
  if (sigma == 0) return 0;
  std::normal_distribution<double> g(0, sigma);
  return g(rng);
}

std::vector<JumpChannel> jump_operators(const NoiseModel& model, const Operators& ops) {
  std::vector<JumpChannel> out;
  if (model.gamma_down > 0) out.push_back({model.gamma_down, ops.a});
  if (model.gamma_up > 0) out.push_back({model.gamma_up, ops.adag});
  if (model.gamma_deph > 0) out.push_back({model.gamma_deph, ops.n});
  return out;
}

DisplacementExponent sample_recoil(Rng& rng, const RecoilModel& model) {
  if (model.kick_per_photon == 0) return {0, 0};
  const double p0 = 1.0 / (1.0 + model.mean_photons);
  std::geometric_distribution<int> gn(p0);
  std::uniform_real_distribution<double> uphase(0, 2 * M_PI);
  int n = gn(rng);
  double dq = 0, dp = 0;
  for (int j = 0; j < n; ++j) {
    double ph = (model.angles == RecoilAngles::isotropic_projected) ? uphase(rng) : 0.0;
    dq += model.kick_per_photon * std::cos(ph);
    dp += model.kick_per_photon * std::sin(ph);
  }
  // exp(i(δp q − δq p)) displaces by (δq, δp).
  return {dp, -dq};
}

}  // namespace gkp
