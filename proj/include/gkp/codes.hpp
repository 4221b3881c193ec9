#pragma once

// Grid-state code definitions (square and hexagonal), finite code states as
// envelope-weighted combs of displaced squeezed states, and the
// measurement-free four-pulse preparation sequences.

#include <string>
#include <variant>
#include <vector>

#include "gkp/fock.hpp"

namespace gkp {

enum class CodeName { square, hexagonal };
enum class LogicalAxis { X, Y, Z };

// A logical Pauli eigenstate label, e.g. {LogicalAxis::Z, -1} for |−Z_L⟩.
struct Eigenstate {
  LogicalAxis axis;
  int sign;  // ±1
};

struct CodeSpec {
  CodeName name;
  DisplacementExponent stab_z, stab_x;
  DisplacementExponent logical_z, logical_x, logical_y;
  double kappa;

  DisplacementExponent logical(LogicalAxis a) const {
    switch (a) {
      case LogicalAxis::X: return logical_x;
      case LogicalAxis::Y: return logical_y;
      default: return logical_z;
    }
  }
};

CodeSpec make_code(CodeName name, double kappa);
CodeSpec make_code(const std::string& name, double kappa);
std::string code_name(const CodeSpec& c);

// Pulse primitives shared by preparation and stabilization sequences.
struct SqueezeStep {
  double r;
  double theta;
};
struct CondDispStep {
  DisplacementExponent d;
  double phi_s;  // 0 = X-conditioned, π/2 = Y-conditioned
};
struct GlobalDispStep {
  DisplacementExponent d;
};
struct DarkProjectStep {};  // conditional post-selection of ancilla |0⟩
struct RepumpStep {};

struct PulseStep {
  std::variant<SqueezeStep, CondDispStep, GlobalDispStep, DarkProjectStep, RepumpStep> op;
  double duration_s = 3e-6;
};

using PulseSequence = std::vector<PulseStep>;

struct PrepParams {
  double theta;
  double lambda;
  double beta[4];
  double phi[4];
};

PrepParams prep_params(const CodeSpec& code, Eigenstate which);

// Squeeze + four state-dependent displacements + conditional dark detection.
PulseSequence prep_sequence(const CodeSpec& code, Eigenstate which, double r);

struct PrepResult {
  double success_prob;
  HybridState state;
};

// Runs prep_sequence on |0⟩_S ⊗ |0⟩ and projects the ancilla dark (no recoil).
PrepResult run_prep(const FockEngine& eng, const CodeSpec& code, Eigenstate which,
                    double r);

// Envelope-weighted comb of displaced squeezed states, z ∈ {0, 1}.
// Weights follow exp(−κ²‖t_s‖²) with t_s the peak displacement from the
// origin; peaks are generated by scalar multiples of the stab_x exponent so
// both stabilizers act trivially on the comb by construction.
HybridState ideal_gkp_state(const FockEngine& eng, const CodeSpec& code, int z);

// Ideal ±1 logical eigenstates assembled from the computational pair.
HybridState ideal_logical_eigenstate(const FockEngine& eng, const CodeSpec& code,
                                     Eigenstate which);

void apply_pulse_sequence(const FockEngine& eng, HybridState& s, const PulseSequence& seq,
                          double* dark_prob = nullptr);

}  // namespace gkp
