#pragma once

// Finite-state modular measurements, the feedback Kraus pairs, the two-round
// stabilization cycle, projective logical initialization and logical readout.
//
// A measurement of the modular operator exp(i·u·(q,p)) runs, right to left,
//   e^{iα(û·(q,p))X} e^{iε(w·(q,p))Y}   with α = |u|/2, w = rot90(û),
// on an ancilla prepared in |0⟩_S, then projects the ancilla:
//   readout basis  = Z  (cosine signal, maximal on code states),
//   error_signal   = Y  (sine signal, odd in a displacement χ).
// A stabilization round appends the feedback pulse e^{iμ(w·(q,p))Y} and
// replaces the projection by a repump (ancilla reset with optional recoil).

#include "gkp/codes.hpp"
#include "gkp/noise.hpp"

namespace gkp {

enum class MeasureBasis { error_signal, readout };

struct MeasurementSpec {
  int k = 1;                     // 1 = logical, 2 = stabilizer
  DisplacementExponent axis;     // unit exponent direction of the measured operator
  double alpha = 0;              // half the measured exponent magnitude
  double eps = 0;                // bias pulse amplitude (nominal)
  MeasureBasis basis = MeasureBasis::readout;
  double eps_offset = 0;         // pulse-shaping emulation; effective ε = ε − offset

  double effective_eps() const { return eps - eps_offset; }
};

MeasurementSpec make_logical_measurement(const CodeSpec& code, LogicalAxis which,
                                         double eps, MeasureBasis basis,
                                         double eps_offset = 0);
// which: 0 = stab_z, 1 = stab_x
MeasurementSpec make_stabilizer_measurement(const CodeSpec& code, int which,
                                            double eps, MeasureBasis basis,
                                            double eps_offset = 0);

struct MeasureResult {
  double p_plus = 0, p_minus = 0;
  HybridState post_plus, post_minus;
  double value() const { return p_plus - p_minus; }
};

// Requires the ancilla of `state` in |0⟩_S.
MeasureResult finite_measure(const FockEngine& eng, const HybridState& state,
                             const MeasurementSpec& spec);

// Signal for a code state displaced by χ along the measured quadrature.
double error_signal(const FockEngine& eng, const HybridState& state,
                    const MeasurementSpec& spec, double chi);

struct KrausPair {
  Eigen::MatrixXcd K_plus, K_minus;
};

enum class CorrectionQuadrature { q_correcting, p_correcting };

// Feedback Kraus pair of one stabilization round,
//   K_± = e^{±iμp} (cos(αq) e^{±iεp} ± sin(αq) e^{∓iεp}) / √2
// for the q-correcting round; the p-correcting pair is its image under the
// quarter phase-space rotation q → −p, p → q.
KrausPair make_feedback_kraus(const FockEngine& eng, double alpha, double eps,
                              double mu, CorrectionQuadrature quad);

// Kraus pair of the measurement itself (no feedback), projected in the
// readout (Z) or error-signal (Y) ancilla basis:
//   Z: K_± = (e^{iαq} cos(εp + π/4) ± e^{−iαq} cos(εp − π/4)) / √2
//   Y: K_± = (cos(αq) e^{±iεp} ± sin(αq) e^{∓iεp}) / √2
KrausPair make_measurement_kraus(const FockEngine& eng, double alpha, double eps,
                                 MeasureBasis basis);

enum class BranchMode { exact_branching, sampled };

struct StabilizationParams {
  CodeSpec code;
  double eps = 0;
  double mu = 0;
  double eps_offset = 0;
  bool recoil_enabled = false;
  const RecoilModel* recoil = nullptr;
  double prune_tol = 1e-6;
  // Exact branching keeps the heaviest branches once the tree outgrows this.
  std::size_t max_branches = 4000;
};

// One round of the dissipative map: bias, stabilizer-conditioned displacement,
// feedback, then repump (ancilla reset; recoil kick on the excited component).
// round_index 1 corrects along stab_z, 2 along stab_x. In sampled mode the
// return value is the repump outcome (1 = excited); exact mode returns -1.
int stabilization_round(const FockEngine& eng, OscEnsemble& ens, int round_index,
                        const StabilizationParams& params, BranchMode mode, Rng& rng);

// Tracks the deterministic logical flip applied by each stabilization cycle
// (conjugation by the Y-type logical): X and Z readouts change sign per cycle.
struct PauliFrame {
  int sx = 1, sy = 1, sz = 1;
  void apply_cycle_flip() {
    sx = -sx;
    sz = -sz;
  }
  double correct(LogicalAxis a, double v) const {
    switch (a) {
      case LogicalAxis::X: return sx * v;
      case LogicalAxis::Y: return sy * v;
      default: return sz * v;
    }
  }
};

// Four-pulse projective initialization (square code), followed by a repump and
// two stabilization cycles. Updates `frame` to identity for the new state.
void logical_init(const FockEngine& eng, OscEnsemble& ens, Eigenstate which,
                  double eps_init, const StabilizationParams& stab, BranchMode mode,
                  Rng& rng, PauliFrame* frame = nullptr);

// Frame-corrected finite logical readout (non-destructive Born value).
// With shots > 0 the exact expectation is replaced by a binomial draw.
double logical_readout(const FockEngine& eng, const OscEnsemble& ens,
                       const CodeSpec& code, LogicalAxis which, double eps,
                       const PauliFrame& frame, int shots = 0, Rng* rng = nullptr);

double stabilizer_readout(const FockEngine& eng, const OscEnsemble& ens,
                          const CodeSpec& code, int which, double eps,
                          int shots = 0, Rng* rng = nullptr);

// Grid search for the feedback amplitude maximizing the stabilizer readout
// after a fixed number of noiseless cycles from vacuum.
double tune_feedback_mu(const FockEngine& eng, const CodeSpec& code, double eps,
                        int cycles, const std::vector<double>& grid,
                        double readout_eps);

}  // namespace gkp
