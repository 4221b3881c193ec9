#pragma once

// Truncated-Fock-space linear algebra for one oscillator coupled to a
// two-level ancilla. Quadratures follow q = (a† + a)/√2, p = i(a† − a)/√2,
// [q, p] = i. A displacement exponent (c_q, c_p) denotes the unitary
// exp(i(c_q·q + c_p·p)); it shifts ⟨p⟩ by +c_q and ⟨q⟩ by −c_p.

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "gkp/common.hpp"

namespace gkp {

struct FockConfig {
  int dim = 300;          // Fock truncation
  double tail_tol = 1e-6; // max population allowed in the top 10% of levels
  void validate() const;
};

struct OscOperator {
  Eigen::MatrixXcd mat;
  bool hermitian = false;
};

struct Operators {
  OscOperator a, adag, q, p, n;
};

Operators build_operators(const FockConfig& cfg);

// Exponent of exp(i(c_q·q + c_p·p)). Doubles as a plain 2-vector for axes.
struct DisplacementExponent {
  double cq = 0;
  double cp = 0;
  double norm() const { return std::hypot(cq, cp); }
};

inline DisplacementExponent operator+(DisplacementExponent a, DisplacementExponent b) {
  return {a.cq + b.cq, a.cp + b.cp};
}
inline DisplacementExponent operator-(DisplacementExponent a, DisplacementExponent b) {
  return {a.cq - b.cq, a.cp - b.cp};
}
inline DisplacementExponent operator-(DisplacementExponent a) { return {-a.cq, -a.cp}; }
inline DisplacementExponent operator*(double s, DisplacementExponent a) {
  return {s * a.cq, s * a.cp};
}
// (a.cq*b.cp - a.cp*b.cq); displacement operators commute iff this is 0 mod 2π.
inline double symplectic(DisplacementExponent a, DisplacementExponent b) {
  return a.cq * b.cp - a.cp * b.cq;
}
inline DisplacementExponent rot90(DisplacementExponent a) { return {-a.cp, a.cq}; }
// Phase-space displacement (Δq, Δp) induced by exp(i(c_q·q + c_p·p)).
inline DisplacementExponent induced_shift(DisplacementExponent a) { return {-a.cp, a.cq}; }

// Amplitudes on (ancilla ⊗ Fock); ancilla index slow, Fock index fast.
struct HybridState {
  Eigen::VectorXcd amps;
  int dim = 0;

  static HybridState vacuum(int dim);
  static HybridState fock(int dim, int n, int ancilla = 0);

  Eigen::VectorBlock<Eigen::VectorXcd> osc(int ancilla) {
    return amps.segment(ancilla * dim, dim);
  }
  Eigen::VectorBlock<const Eigen::VectorXcd> osc(int ancilla) const {
    return amps.segment(ancilla * dim, dim);
  }
  double norm() const { return amps.norm(); }
  void normalize();
  double excited_population() const;  // ancilla |1⟩ weight
};

struct OscEnsemble {
  struct Branch {
    double weight;
    HybridState state;
  };
  std::vector<Branch> branches;

  static OscEnsemble pure(HybridState s);
  double total_weight() const;
  void prune(double tol);  // drop light branches, renormalize weights
};

enum class AncillaBasis { Z, Y, X };

struct ProjectionResult {
  double probability = 0;
  HybridState state;
  bool degenerate = false;
};

// Owns the operator tables and the eigendecompositions behind every pulse.
// Displacements use the spectral decomposition of q conjugated by Fock
// rotations; squeezes use the decomposition of (qp+pq)/2. Dense unitaries
// for repeated pulses are cached keyed by quantized (c_q, c_p).
// Immutable after construction apart from the mutex-guarded cache; safe to
// share across threads.
class FockEngine {
 public:
  explicit FockEngine(FockConfig cfg);

  const FockConfig& config() const { return cfg_; }
  int dim() const { return cfg_.dim; }
  const Operators& ops() const { return ops_; }

  HybridState vacuum() const { return HybridState::vacuum(cfg_.dim); }

  // exp(i(c_q·q + c_p·p)) on the oscillator, identity on the ancilla.
  void displace(HybridState& s, DisplacementExponent d, bool guard = true) const;
  // exp(i(c_q·q + c_p·p)·σ_φs) with σ_φs = cos(φs)X + sin(φs)Y.
  void conditional_displace(HybridState& s, DisplacementExponent d, double phi_s,
                            bool guard = true) const;
  // exp(−iγ q_φm σ_φs), q_φm = cos(φm)q − sin(φm)p.
  void sdd(HybridState& s, double gamma, double phi_m, double phi_s) const;
  // S(r e^{−2iθ}) = exp(i(r/2)(q_θp_θ + p_θq_θ)); θ=0 squeezes position.
  void squeeze(HybridState& s, double r, double theta = 0, bool guard = true) const;
  // exp(iθ a†a)
  void rotate(HybridState& s, double theta) const;

  ProjectionResult ancilla_project(const HybridState& s, AncillaBasis basis,
                                   int outcome) const;

  cplx expectation(const HybridState& s, const OscOperator& op) const;
  cplx expectation(const HybridState& s, DisplacementExponent d) const;
  cplx expectation(const OscEnsemble& e, const OscOperator& op) const;
  cplx expectation(const OscEnsemble& e, DisplacementExponent d) const;

  std::vector<cplx> characteristic_function(const HybridState& s,
                                            const std::vector<DisplacementExponent>& grid) const;

  // Dense cached unitary for exp(i(c_q·q + c_p·p)).
  const Eigen::MatrixXcd& displacement_matrix(DisplacementExponent d) const;
  Eigen::MatrixXcd rotation_matrix(double theta) const;

  double tail_population(const HybridState& s) const;
  void check_tail(const HybridState& s, const char* where) const;

 private:
  void apply_disp_half(Eigen::Ref<Eigen::VectorXcd> osc, double mag, double phi) const;

  FockConfig cfg_;
  Operators ops_;
  Eigen::VectorXd q_evals_;
  Eigen::MatrixXcd q_evecs_;
  Eigen::VectorXd sq_evals_;
  Eigen::MatrixXcd sq_evecs_;

  mutable std::mutex cache_mu_;
  mutable std::map<std::pair<std::int64_t, std::int64_t>,
                   std::unique_ptr<Eigen::MatrixXcd>> disp_cache_;
};

}  // namespace gkp
