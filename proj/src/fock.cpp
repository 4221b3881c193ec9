#include "gkp/fock.hpp"

#include <Eigen/Eigenvalues>

namespace gkp {

void FockConfig::validate() const {
  if (dim < 2) throw ConfigError("FockConfig: dim must be >= 2");
  if (!(tail_tol > 0 && tail_tol < 1))
    throw ConfigError("FockConfig: tail_tol must lie in (0,1)");
}

Operators build_operators(const FockConfig& cfg) {
  cfg.validate();
  const int N = cfg.dim;
  Operators o;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
  for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(double(n));
  o.a = {a, false};
  o.adag = {a.adjoint(), false};
  o.q = {(a.adjoint() + a) / std::sqrt(2.0), true};
  o.p = {cplx(0, 1) * (a.adjoint() - a) / std::sqrt(2.0), true};
  o.n = {a.adjoint() * a, true};
  return o;
}

HybridState HybridState::vacuum(int dim) { return fock(dim, 0, 0); }

HybridState HybridState::fock(int dim, int n, int ancilla) {
  HybridState s;
  s.dim = dim;
  s.amps = Eigen::VectorXcd::Zero(2 * dim);
  s.amps[ancilla * dim + n] = 1.0;
  return s;
}

void HybridState::normalize() {
  double nr = amps.norm();
  if (nr <= 0) throw Error("cannot normalize zero state");
  amps /= nr;
}

double HybridState::excited_population() const {
  return osc(1).squaredNorm() / amps.squaredNorm();
}

OscEnsemble OscEnsemble::pure(HybridState s) { return {{{1.0, std::move(s)}}}; }

double OscEnsemble::total_weight() const {
  double w = 0;
  for (const auto& b : branches) w += b.weight;
  return w;
}

void OscEnsemble::prune(double tol) {
  std::vector<Branch> keep;
  keep.reserve(branches.size());
  for (auto& b : branches)
    if (b.weight >= tol) keep.push_back(std::move(b));
  if (keep.empty()) throw Error("ensemble pruned to nothing");
  branches = std::move(keep);
  double w = total_weight();
  for (auto& b : branches) b.weight /= w;
}

FockEngine::FockEngine(FockConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  ops_ = build_operators(cfg_);

  // q is real symmetric; its spectral decomposition drives all displacements:
  // exp(i(c_q q + c_p p)) = e^{iφn} exp(i|c| q) e^{−iφn}, φ = atan2(c_p, c_q).
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esq(ops_.q.mat.real());
  if (esq.info() != Eigen::Success) throw Error("eigendecomposition of q failed");
  q_evals_ = esq.eigenvalues();
  q_evecs_ = esq.eigenvectors().cast<cplx>();

  Eigen::MatrixXcd gsq =
      0.5 * (ops_.q.mat * ops_.p.mat + ops_.p.mat * ops_.q.mat);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ess(gsq);
  if (ess.info() != Eigen::Success) throw Error("eigendecomposition of qp+pq failed");
  sq_evals_ = ess.eigenvalues();
  sq_evecs_ = ess.eigenvectors();
}

namespace {

void apply_fock_phase(Eigen::Ref<Eigen::VectorXcd> osc, double theta) {
  if (theta == 0) return;
  const int N = int(osc.size());
  for (int n = 0; n < N; ++n) osc[n] *= std::polar(1.0, theta * n);
}

}  // namespace

void FockEngine::apply_disp_half(Eigen::Ref<Eigen::VectorXcd> osc, double mag,
                                 double phi) const {
  apply_fock_phase(osc, -phi);
  Eigen::VectorXcd y = q_evecs_.adjoint() * osc;
  for (int i = 0; i < y.size(); ++i) y[i] *= std::polar(1.0, mag * q_evals_[i]);
  osc = q_evecs_ * y;
  apply_fock_phase(osc, phi);
}

void FockEngine::displace(HybridState& s, DisplacementExponent d, bool guard) const {
  if (s.dim != cfg_.dim) throw DimensionError("state/engine dimension mismatch");
  const double mag = d.norm();
  if (mag != 0) {
    const double phi = std::atan2(d.cp, d.cq);
    apply_disp_half(s.osc(0), mag, phi);
    apply_disp_half(s.osc(1), mag, phi);
  }
  if (guard) check_tail(s, "displace");
}

void FockEngine::conditional_displace(HybridState& s, DisplacementExponent d,
                                      double phi_s, bool guard) const {
  if (s.dim != cfg_.dim) throw DimensionError("state/engine dimension mismatch");
  const int N = cfg_.dim;
  const cplx ph = std::polar(1.0, phi_s);
  // σ_φs eigenstates: |±⟩ = (|0⟩ ± e^{iφs}|1⟩)/√2; each gets exp(±i d·(q,p)).
  Eigen::VectorXcd plus = (s.osc(0) + std::conj(ph) * s.osc(1)) / std::sqrt(2.0);
  Eigen::VectorXcd minus = (s.osc(0) - std::conj(ph) * s.osc(1)) / std::sqrt(2.0);
  const double mag = d.norm();
  if (mag != 0) {
    const double phi = std::atan2(d.cp, d.cq);
    apply_disp_half(plus, mag, phi);
    apply_disp_half(minus, -mag, phi);
  }
  s.amps.segment(0, N) = (plus + minus) / std::sqrt(2.0);
  s.amps.segment(N, N) = ph * (plus - minus) / std::sqrt(2.0);
  if (guard) check_tail(s, "conditional_displace");
}

void FockEngine::sdd(HybridState& s, double gamma, double phi_m, double phi_s) const {
  // exp(−iγ q_φm σ_φs) with q_φm = cos(φm)q − sin(φm)p.
  DisplacementExponent d{-gamma * std::cos(phi_m), gamma * std::sin(phi_m)};
  conditional_displace(s, d, phi_s);
}

void FockEngine::squeeze(HybridState& s, double r, double theta, bool guard) const {
  if (s.dim != cfg_.dim) throw DimensionError("state/engine dimension mismatch");
  for (int anc = 0; anc < 2; ++anc) {
    auto osc = s.osc(anc);
    apply_fock_phase(osc, theta);
    Eigen::VectorXcd y = sq_evecs_.adjoint() * osc;
    for (int i = 0; i < y.size(); ++i) y[i] *= std::polar(1.0, r * sq_evals_[i]);
    osc = sq_evecs_ * y;
    apply_fock_phase(osc, -theta);
  }
  if (guard) check_tail(s, "squeeze");
}

void FockEngine::rotate(HybridState& s, double theta) const {
  apply_fock_phase(s.osc(0), theta);
  apply_fock_phase(s.osc(1), theta);
}

ProjectionResult FockEngine::ancilla_project(const HybridState& s, AncillaBasis basis,
                                             int outcome) const {
  if (outcome != 1 && outcome != -1) throw ProtocolError("outcome must be ±1");
  const int N = cfg_.dim;
  Eigen::VectorXcd comp(N);
  const double sg = outcome;
  switch (basis) {
    case AncillaBasis::Z:
      comp = (outcome == 1) ? s.osc(0) : s.osc(1);
      break;
    case AncillaBasis::Y:
      // ⟨±i| = (⟨0| ∓ i⟨1|)/√2
      comp = (s.osc(0) - cplx(0, sg) * s.osc(1)) / std::sqrt(2.0);
      break;
    case AncillaBasis::X:
      comp = (s.osc(0) + sg * s.osc(1)) / std::sqrt(2.0);
      break;
  }
  ProjectionResult r;
  r.probability = comp.squaredNorm();
  r.state.dim = N;
  r.state.amps = Eigen::VectorXcd::Zero(2 * N);
  if (r.probability < 1e-14) {
    r.degenerate = true;
    r.probability = std::max(r.probability, 0.0);
    return r;
  }
  comp /= std::sqrt(r.probability);
  switch (basis) {
    case AncillaBasis::Z:
      r.state.amps.segment((outcome == 1 ? 0 : 1) * N, N) = comp;
      break;
    case AncillaBasis::Y:
      r.state.amps.segment(0, N) = comp / std::sqrt(2.0);
      r.state.amps.segment(N, N) = cplx(0, sg) * comp / std::sqrt(2.0);
      break;
    case AncillaBasis::X:
      r.state.amps.segment(0, N) = comp / std::sqrt(2.0);
      r.state.amps.segment(N, N) = sg * comp / std::sqrt(2.0);
      break;
  }
  return r;
}

cplx FockEngine::expectation(const HybridState& s, const OscOperator& op) const {
  if (op.mat.rows() != cfg_.dim) throw DimensionError("operator dimension mismatch");
  cplx v = s.osc(0).dot(op.mat * s.osc(0)) + s.osc(1).dot(op.mat * s.osc(1));
  if (op.hermitian && std::abs(v.imag()) > 1e-9)
    throw Error("hermitian expectation has imaginary residue");
  return v;
}

cplx FockEngine::expectation(const HybridState& s, DisplacementExponent d) const {
  HybridState t = s;
  displace(t, d, /*guard=*/false);
  return s.amps.dot(t.amps);
}

cplx FockEngine::expectation(const OscEnsemble& e, const OscOperator& op) const {
  cplx v = 0;
  for (const auto& b : e.branches) v += b.weight * expectation(b.state, op);
  return v;
}

cplx FockEngine::expectation(const OscEnsemble& e, DisplacementExponent d) const {
  cplx v = 0;
  for (const auto& b : e.branches) v += b.weight * expectation(b.state, d);
  return v;
}

std::vector<cplx> FockEngine::characteristic_function(
    const HybridState& s, const std::vector<DisplacementExponent>& grid) const {
  std::vector<cplx> out;
  out.reserve(grid.size());
  for (const auto& d : grid) {
    HybridState t = s;
    displace(t, d, /*guard=*/false);
    check_tail(t, "characteristic_function");
    out.push_back(s.amps.dot(t.amps));
  }
  return out;
}

const Eigen::MatrixXcd& FockEngine::displacement_matrix(DisplacementExponent d) const {
  const auto key = std::make_pair(std::int64_t(std::llround(d.cq * 1e12)),
                                  std::int64_t(std::llround(d.cp * 1e12)));
  std::scoped_lock lk(cache_mu_);
  auto it = disp_cache_.find(key);
  if (it != disp_cache_.end()) return *it->second;

  const int N = cfg_.dim;
  const double mag = d.norm();
  const double phi = std::atan2(d.cp, d.cq);
  Eigen::VectorXcd ph(N);
  for (int i = 0; i < N; ++i) ph[i] = std::polar(1.0, mag * q_evals_[i]);
  Eigen::MatrixXcd m = q_evecs_ * ph.asDiagonal() * q_evecs_.adjoint();
  if (phi != 0) {
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < N; ++c)
        m(r, c) *= std::polar(1.0, phi * (r - c));
  }
  auto up = std::make_unique<Eigen::MatrixXcd>(std::move(m));
  const auto& ref = *up;
  disp_cache_.emplace(key, std::move(up));
  return ref;
}

Eigen::MatrixXcd FockEngine::rotation_matrix(double theta) const {
  Eigen::VectorXcd ph(cfg_.dim);
  for (int n = 0; n < cfg_.dim; ++n) ph[n] = std::polar(1.0, theta * n);
  return ph.asDiagonal();
}

double FockEngine::tail_population(const HybridState& s) const {
  const int N = cfg_.dim;
  const int lo = int(0.9 * N);
  double t = 0;
  for (int anc = 0; anc < 2; ++anc)
    for (int n = lo; n < N; ++n) t += std::norm(s.amps[anc * N + n]);
  return t;
}

void FockEngine::check_tail(const HybridState& s, const char* where) const {
  double t = tail_population(s);
  if (t > cfg_.tail_tol)
    throw TruncationError(std::string(where) + ": truncation tail population " +
                              std::to_string(t) + " exceeds tolerance",
                          t);
}

}  // namespace gkp
