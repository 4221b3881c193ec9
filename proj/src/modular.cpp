#include "gkp/modular.hpp"

#include <algorithm>
#include <cmath>

namespace gkp {

namespace {

DisplacementExponent unit(DisplacementExponent d) {
  double n = d.norm();
  if (n == 0) throw ConfigError("zero axis");
  return {d.cq / n, d.cp / n};
}

void require_ground_ancilla(const HybridState& s, const char* where) {
  if (s.excited_population() > 1e-9)
    throw ProtocolError(std::string(where) + ": ancilla not in |0>");
}

}  // namespace

MeasurementSpec make_logical_measurement(const CodeSpec& code, LogicalAxis which,
                                         double eps, MeasureBasis basis,
                                         double eps_offset) {
  MeasurementSpec m;
  m.k = 1;
  DisplacementExponent u = code.logical(which);
  m.axis = unit(u);
  m.alpha = 0.5 * u.norm();
  m.eps = eps;
  m.basis = basis;
  m.eps_offset = eps_offset;
  return m;
}

MeasurementSpec make_stabilizer_measurement(const CodeSpec& code, int which,
                                            double eps, MeasureBasis basis,
                                            double eps_offset) {
  MeasurementSpec m;
  m.k = 2;
  DisplacementExponent u = (which == 0) ? code.stab_z : code.stab_x;
  m.axis = unit(u);
  m.alpha = 0.5 * u.norm();
  m.eps = eps;
  m.basis = basis;
  m.eps_offset = eps_offset;
  return m;
}

MeasureResult finite_measure(const FockEngine& eng, const HybridState& state,
                             const MeasurementSpec& spec) {
  require_ground_ancilla(state, "finite_measure");
  HybridState s = state;
  const DisplacementExponent w = rot90(spec.axis);
  eng.conditional_displace(s, spec.effective_eps() * w, M_PI / 2.0);
  eng.conditional_displace(s, spec.alpha * spec.axis, 0.0);
  const AncillaBasis basis =
      spec.basis == MeasureBasis::readout ? AncillaBasis::Z : AncillaBasis::Y;
  auto plus = eng.ancilla_project(s, basis, +1);
  auto minus = eng.ancilla_project(s, basis, -1);
  MeasureResult r;
  r.p_plus = plus.probability;
  r.p_minus = minus.probability;
  r.post_plus = std::move(plus.state);
  r.post_minus = std::move(minus.state);
  return r;
}

double error_signal(const FockEngine& eng, const HybridState& state,
                    const MeasurementSpec& spec, double chi) {
  HybridState s = state;
  // Displace by χ along the measured quadrature direction (axis in phase space).
  eng.displace(s, {chi * spec.axis.cp, -chi * spec.axis.cq});
  MeasurementSpec es = spec;
  es.basis = MeasureBasis::error_signal;
  return finite_measure(eng, s, es).value();
}

KrausPair make_measurement_kraus(const FockEngine& eng, double alpha, double eps,
                                 MeasureBasis basis) {
  const auto& Dq_p = eng.displacement_matrix({alpha, 0});
  const auto& Dq_m = eng.displacement_matrix({-alpha, 0});
  const auto& Ep = eng.displacement_matrix({0, eps});
  const auto& Em = eng.displacement_matrix({0, -eps});
  KrausPair k;
  if (basis == MeasureBasis::error_signal) {
    Eigen::MatrixXcd cos_aq = 0.5 * (Dq_p + Dq_m);
    Eigen::MatrixXcd sin_aq = (Dq_p - Dq_m) / cplx(0, 2);
    k.K_plus = (cos_aq * Ep + sin_aq * Em) / std::sqrt(2.0);
    k.K_minus = (cos_aq * Em - sin_aq * Ep) / std::sqrt(2.0);
  } else {
    // cos(εp ± π/4) = (cos(εp) ∓ sin(εp))/√2
    Eigen::MatrixXcd cos_p = 0.5 * (Ep + Em);
    Eigen::MatrixXcd sin_p = (Ep - Em) / cplx(0, 2);
    Eigen::MatrixXcd plus_q = (cos_p - sin_p) / std::sqrt(2.0);   // cos(εp + π/4)
    Eigen::MatrixXcd minus_q = (cos_p + sin_p) / std::sqrt(2.0);  // cos(εp − π/4)
    k.K_plus = (Dq_p * plus_q + Dq_m * minus_q) / std::sqrt(2.0);
    k.K_minus = (Dq_p * plus_q - Dq_m * minus_q) / std::sqrt(2.0);
  }
  return k;
}

KrausPair make_feedback_kraus(const FockEngine& eng, double alpha, double eps,
                              double mu, CorrectionQuadrature quad) {
  const auto& Dq_p = eng.displacement_matrix({alpha, 0});
  const auto& Dq_m = eng.displacement_matrix({-alpha, 0});
  Eigen::MatrixXcd cos_aq = 0.5 * (Dq_p + Dq_m);
  Eigen::MatrixXcd sin_aq = (Dq_p - Dq_m) / cplx(0, 2);
  const auto& Ep = eng.displacement_matrix({0, eps});
  const auto& Em = eng.displacement_matrix({0, -eps});
  const auto& Fp = eng.displacement_matrix({0, mu});
  const auto& Fm = eng.displacement_matrix({0, -mu});

  KrausPair k;
  k.K_plus = (Fp * (cos_aq * Ep + sin_aq * Em)) / std::sqrt(2.0);
  k.K_minus = (Fm * (cos_aq * Em - sin_aq * Ep)) / std::sqrt(2.0);
  if (quad == CorrectionQuadrature::p_correcting) {
    // Quarter rotation q → −p, p → q maps the position-correcting round onto
    // the momentum-correcting one.
    Eigen::MatrixXcd R = eng.rotation_matrix(-M_PI / 2.0);
    Eigen::MatrixXcd Rd = eng.rotation_matrix(M_PI / 2.0);
    k.K_plus = R * k.K_plus * Rd;
    k.K_minus = R * k.K_minus * Rd;
  }
  return k;
}

namespace {

struct RepumpOutcome {
  double p_excited;
  HybridState ground_branch;
  HybridState excited_branch;  // recoil applied, ancilla reset
};

RepumpOutcome repump_split(const FockEngine& eng, const HybridState& s,
                           const StabilizationParams& params, Rng& rng) {
  const int N = s.dim;
  RepumpOutcome out;
  const double n0 = s.osc(0).squaredNorm();
  const double n1 = s.osc(1).squaredNorm();
  const double tot = n0 + n1;
  out.p_excited = n1 / tot;

  out.ground_branch.dim = N;
  out.ground_branch.amps = Eigen::VectorXcd::Zero(2 * N);
  if (n0 > 0) out.ground_branch.amps.segment(0, N) = s.osc(0) / std::sqrt(n0);

  out.excited_branch.dim = N;
  out.excited_branch.amps = Eigen::VectorXcd::Zero(2 * N);
  if (n1 > 0) {
    out.excited_branch.amps.segment(0, N) = s.osc(1) / std::sqrt(n1);
    if (params.recoil_enabled && params.recoil) {
      DisplacementExponent kick = sample_recoil(rng, *params.recoil);
      eng.displace(out.excited_branch, kick);
    }
  }
  return out;
}

void cap_branches(OscEnsemble& ens, std::size_t max_branches) {
  if (ens.branches.size() <= max_branches) return;
  std::sort(ens.branches.begin(), ens.branches.end(),
            [](const auto& a, const auto& b) { return a.weight > b.weight; });
  ens.branches.resize(max_branches);
  double w = ens.total_weight();
  for (auto& b : ens.branches) b.weight /= w;
}

}  // namespace

int stabilization_round(const FockEngine& eng, OscEnsemble& ens, int round_index,
                        const StabilizationParams& params, BranchMode mode, Rng& rng) {
  if (round_index != 1 && round_index != 2)
    throw ProtocolError("round_index must be 1 or 2");
  const DisplacementExponent stab =
      (round_index == 1) ? params.code.stab_z : params.code.stab_x;
  const DisplacementExponent axis = unit(stab);
  const DisplacementExponent w = rot90(axis);
  const double alpha = 0.5 * stab.norm();
  const double eps_eff = params.eps - params.eps_offset;

  int choice = -1;
  OscEnsemble next;
  next.branches.reserve(ens.branches.size() * (mode == BranchMode::exact_branching ? 2 : 1));
  for (auto& br : ens.branches) {
    require_ground_ancilla(br.state, "stabilization_round");
    eng.conditional_displace(br.state, eps_eff * w, M_PI / 2.0);
    eng.conditional_displace(br.state, alpha * axis, 0.0);
    eng.conditional_displace(br.state, params.mu * w, M_PI / 2.0);

    RepumpOutcome rp = repump_split(eng, br.state, params, rng);
    if (mode == BranchMode::exact_branching) {
      if (rp.p_excited < 1.0)
        next.branches.push_back({br.weight * (1 - rp.p_excited), std::move(rp.ground_branch)});
      if (rp.p_excited > 0.0)
        next.branches.push_back({br.weight * rp.p_excited, std::move(rp.excited_branch)});
    } else {
      std::uniform_real_distribution<double> u(0, 1);
      const bool excited = u(rng) < rp.p_excited;
      choice = excited ? 1 : 0;
      next.branches.push_back({br.weight, excited ? std::move(rp.excited_branch)
                                                  : std::move(rp.ground_branch)});
    }
  }
  ens = std::move(next);
  if (mode == BranchMode::exact_branching) {
    ens.prune(params.prune_tol);
    cap_branches(ens, params.max_branches);
  }
  return choice;
}

namespace {

struct InitRow {
  DisplacementExponent bias;      // Y-conditioned
  DisplacementExponent global;
  DisplacementExponent measure;   // X-conditioned
  DisplacementExponent feedback;  // Y-conditioned
};

// Bias follows the round rule: +ε along rot90 of the measured axis. The
// feedback sign selects the ±1 eigenstate; the two rows of a pair differ
// only in that sign.
InitRow init_row(Eigenstate which, double eps) {
  const double d = kSqrtPi / 2.0;
  const double sg = which.sign;
  switch (which.axis) {
    case LogicalAxis::X:
      return {{eps, 0}, {d, 0}, {0, -d}, {sg * d, -sg * d}};
    case LogicalAxis::Y:
      return {{eps, eps}, {d, 0}, {d, -d}, {0, sg * d}};
    default:
      return {{0, eps}, {0, d}, {d, 0}, {sg * d, sg * d}};
  }
}

}  // namespace

void logical_init(const FockEngine& eng, OscEnsemble& ens, Eigenstate which,
                  double eps_init, const StabilizationParams& stab, BranchMode mode,
                  Rng& rng, PauliFrame* frame) {
  if (stab.code.name != CodeName::square)
    throw ProtocolError("projective logical initialization is defined for the square code");
  const InitRow row = init_row(which, eps_init);

  OscEnsemble next;
  next.branches.reserve(ens.branches.size() * (mode == BranchMode::exact_branching ? 2 : 1));
  for (auto& br : ens.branches) {
    require_ground_ancilla(br.state, "logical_init");
    eng.conditional_displace(br.state, row.bias, M_PI / 2.0);
    eng.displace(br.state, row.global);
    eng.conditional_displace(br.state, row.measure, 0.0);
    eng.conditional_displace(br.state, row.feedback, M_PI / 2.0);

    RepumpOutcome rp = repump_split(eng, br.state, stab, rng);
    if (mode == BranchMode::exact_branching) {
      if (rp.p_excited < 1.0)
        next.branches.push_back({br.weight * (1 - rp.p_excited), std::move(rp.ground_branch)});
      if (rp.p_excited > 0.0)
        next.branches.push_back({br.weight * rp.p_excited, std::move(rp.excited_branch)});
    } else {
      std::uniform_real_distribution<double> u(0, 1);
      next.branches.push_back({br.weight, u(rng) < rp.p_excited
                                              ? std::move(rp.excited_branch)
                                              : std::move(rp.ground_branch)});
    }
  }
  ens = std::move(next);
  if (mode == BranchMode::exact_branching) {
    ens.prune(stab.prune_tol);
    cap_branches(ens, stab.max_branches);
  }

  // Two extra stabilization cycles settle the envelope.
  for (int c = 0; c < 2; ++c) {
    stabilization_round(eng, ens, 1, stab, mode, rng);
    stabilization_round(eng, ens, 2, stab, mode, rng);
  }
  if (frame) *frame = PauliFrame{};
}

namespace {

double readout_value(const FockEngine& eng, const OscEnsemble& ens,
                     const MeasurementSpec& spec, int shots, Rng* rng) {
  double v = 0;
  for (const auto& b : ens.branches)
    v += b.weight * finite_measure(eng, b.state, spec).value();
  if (shots > 0) {
    if (!rng) throw ProtocolError("finite-shot readout needs an RNG");
    std::binomial_distribution<int> bin(shots, std::clamp(0.5 * (1 + v), 0.0, 1.0));
    v = 2.0 * bin(*rng) / shots - 1.0;
  }
  return v;
}

}  // namespace

double logical_readout(const FockEngine& eng, const OscEnsemble& ens,
                       const CodeSpec& code, LogicalAxis which, double eps,
                       const PauliFrame& frame, int shots, Rng* rng) {
  MeasurementSpec spec =
      make_logical_measurement(code, which, eps, MeasureBasis::readout);
  return frame.correct(which, readout_value(eng, ens, spec, shots, rng));
}

double stabilizer_readout(const FockEngine& eng, const OscEnsemble& ens,
                          const CodeSpec& code, int which, double eps,
                          int shots, Rng* rng) {
  MeasurementSpec spec =
      make_stabilizer_measurement(code, which, eps, MeasureBasis::readout);
  return readout_value(eng, ens, spec, shots, rng);
}

double tune_feedback_mu(const FockEngine& eng, const CodeSpec& code, double eps,
                        int cycles, const std::vector<double>& grid,
                        double readout_eps) {
  double best_mu = grid.at(0);
  double best_v = -2;
  for (double mu : grid) {
    StabilizationParams p;
    p.code = code;
    p.eps = eps;
    p.mu = mu;
    p.max_branches = 4000;
    Rng rng(1);
    OscEnsemble ens = OscEnsemble::pure(eng.vacuum());
    for (int c = 0; c < cycles; ++c) {
      stabilization_round(eng, ens, 1, p, BranchMode::exact_branching, rng);
      stabilization_round(eng, ens, 2, p, BranchMode::exact_branching, rng);
    }
    double v = stabilizer_readout(eng, ens, code, 0, readout_eps);
    if (v > best_v) {
      best_v = v;
      best_mu = mu;
    }
  }
  return best_mu;
}

}  // namespace gkp
