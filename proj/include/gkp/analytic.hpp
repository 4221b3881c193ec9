#pragma once

// Closed-form expectation machinery for finite grid states: vacuum
// displacement identity, the diagonal single-sum comb evaluation, the biased
// measurement and preservation-fidelity formulas, and the 1-D bias optimizer.
// Used as an independent oracle against the numeric engine.

#include <complex>
#include <vector>

#include "gkp/common.hpp"

namespace gkp {

// ⟨0| e^{iAq + iBp} |0⟩ = e^{−(A²+B²)/4}
cplx vacuum_disp_expect(double A, double B);

// Ordered product of displacement factors e^{i(A_j q + B_j p)} with an overall
// scalar phase; normal-orderable to a single displacement plus phase.
struct DisplacementProduct {
  struct Term {
    double A;
    double B;
  };
  std::vector<Term> terms;  // applied left to right as written (leftmost first in the product)
  double scalar_phase = 0;

  // Collapse to (A, B, φ) with e^{iφ} e^{i(Aq+Bp)}.
  void normal_order(double& A, double& B, double& phase) const;
};

struct EnvelopeState {
  double kappa;
  double l;       // comb half-step: peaks sit at (2s+z)·l
  int z;          // 0 or 1
  int s_max = 0;  // 0 = choose from the envelope cutoff
};

// Diagonal (s = s') comb evaluation of ⟨op⟩ on the finite grid state. Valid
// while the p-exponent stays below the comb spacing; |B| ≥ l raises a warning
// flag through the optional pointer and the exact double sum can be requested
// for validation.
cplx gkp_expect(const EnvelopeState& env, const DisplacementProduct& op,
                bool exact_double_sum = false, bool* domain_warning = nullptr);

// Biased error-signal value for a state displaced by χ along the measured
// quadrature: (−1)^{kz} e^{−πk²κ²/4} sin(k√πχ) [e^{−ε²/κ²} + sin(k√πε)].
double expect_Y_biased(int k, double kappa, double eps, double chi, int z);

// χ = 0 readout (cosine) form: (−1)^{kz} e^{−πk²κ²/4} [e^{−ε²/κ²} + sin(k√πε)].
double readout_biased(int k, double kappa, double eps, int z);

// e^{−πκ²/2} (e^{−ε²/κ²} + sin(ε√π))², single-round preservation with μ = ε.
double preservation_fidelity(double kappa, double eps);

enum class EpsObjective { readout_k1, readout_k2, preservation };

// Golden-section maximization over [0, 3κ] (tolerance 1e-6) with a dense-grid
// fallback when the objective is not unimodal on the bracket.
double optimize_epsilon(EpsObjective obj, double kappa);

}  // namespace gkp
