#include "stochq/sh_sim.hpp"

#include <cmath>
#include <sstream>

namespace stochq::sh {

double hermiticity_defect(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) return INFINITY;
  return max_abs(ComplexMatrix(h - h.adjoint()));
}

HermitianMatrix::HermitianMatrix(ComplexMatrix h, bool symmetrize) : h_(std::move(h)) {
  if (h_.rows() != h_.cols() || h_.rows() == 0) {
    throw ValidationError("Hamiltonian must be a non-empty square matrix", "n");
  }
  if (symmetrize) {
    ComplexMatrix sym = 0.5 * (h_ + h_.adjoint());
    h_ = std::move(sym);
    return;
  }
  const double defect = hermiticity_defect(h_);
  if (defect > kHermitianTolerance) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: max |H - H^dagger| = " << defect;
    throw ValidationError(msg.str(), "im");
  }
}

SHSystem::SHSystem(RealMatrix a, RealMatrix b) : A(std::move(a)), B(std::move(b)) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
    throw ValidationError("A and B must be square with equal dimensions");
  }
  if (A != A.transpose()) throw ValidationError("A must be symmetric", "re");
  if (B != RealMatrix(-B.transpose())) throw ValidationError("B must be antisymmetric", "im");
}

SHSystem sh_decompose(const HermitianMatrix& H) {
  const RealMatrix re = H.matrix().real();
  const RealMatrix im = H.matrix().imag();
  return SHSystem(0.5 * (re + re.transpose()), 0.5 * (im - im.transpose()));
}

ComplexMatrix sh_recompose(const SHSystem& sys) {
  ComplexMatrix h(sys.dim(), sys.dim());
  h.real() = sys.A;
  h.imag() = sys.B;
  return h;
}

namespace {

void check_dims(const SHSystem& sys, const PhaseSpaceState& s) {
  if (s.q.size() != sys.dim() || s.p.size() != sys.dim()) {
    throw ValidationError("phase-space state dimension does not match the system");
  }
}

}  // namespace

double sh_energy(const SHSystem& sys, const PhaseSpaceState& s) {
  check_dims(sys, s);
  const double kinetic = 0.5 * s.p.dot(sys.A * s.p);
  const double potential = 0.5 * s.q.dot(sys.A * s.q);
  // sum_kl B_lk q_k p_l = p^T B q
  const double coupling = s.p.dot(sys.B * s.q);
  return kinetic + coupling + potential;
}

PhaseSpaceState sh_velocity(const SHSystem& sys, const PhaseSpaceState& s) {
  check_dims(sys, s);
  return {sys.A * s.p + sys.B * s.q, -sys.A * s.q + sys.B * s.p};
}

namespace {

using BlockMatrix = RealMatrix;  // 2N x 2N acting on (q; p)

// Exact flow of the A-part: q(t) = C q + S p, p(t) = -S q + C p with
// C = cos(At), S = sin(At).
BlockMatrix a_flow(const RealMatrix& A, double t) {
  const Eigen::Index n = A.rows();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(A);
  if (es.info() != Eigen::Success) throw SolverError("eigensolver failed on A");
  const RealMatrix& V = es.eigenvectors();
  const RealVector angle = es.eigenvalues() * t;
  const RealMatrix C = V * angle.array().cos().matrix().asDiagonal() * V.transpose();
  const RealMatrix S = V * angle.array().sin().matrix().asDiagonal() * V.transpose();
  BlockMatrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = C;
  m.topRightCorner(n, n) = S;
  m.bottomLeftCorner(n, n) = -S;
  m.bottomRightCorner(n, n) = C;
  return m;
}

// Exact flow of the B-part: q(t) = exp(Bt) q, p(t) = exp(Bt) p. iB is
// Hermitian, so exp(Bt) = W exp(-i lambda t) W^dagger.
BlockMatrix b_flow(const RealMatrix& B, double t) {
  const Eigen::Index n = B.rows();
  const ComplexMatrix iB = Complex(0.0, 1.0) * B.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(iB);
  if (es.info() != Eigen::Success) throw SolverError("eigensolver failed on B");
  const ComplexMatrix& W = es.eigenvectors();
  ComplexVector phase(n);
  for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
  const RealMatrix R = (W * phase.asDiagonal() * W.adjoint()).real();
  BlockMatrix m = BlockMatrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = R;
  m.bottomRightCorner(n, n) = R;
  return m;
}

BlockMatrix generator(const SHSystem& sys) {
  const Eigen::Index n = sys.dim();
  BlockMatrix g(2 * n, 2 * n);
  g.topLeftCorner(n, n) = sys.B;
  g.topRightCorner(n, n) = sys.A;
  g.bottomLeftCorner(n, n) = -sys.A;
  g.bottomRightCorner(n, n) = sys.B;
  return g;
}

}  // namespace

ShTrajectory sh_integrate(const SHSystem& sys, const PhaseSpaceState& s0, double dt, double T,
                          Integrator method, long stride) {
  check_dims(sys, s0);
  if (!(dt > 0.0)) throw ValidationError("dt must be positive", "dt");
  if (!(T >= 0.0)) throw ValidationError("T must be non-negative", "T");
  if (stride < 1) throw ValidationError("stride must be >= 1", "stride");
  const Eigen::Index n = sys.dim();
  const long steps = T == 0.0 ? 0 : static_cast<long>(std::ceil(T / dt - 1e-9));
  const double h = steps == 0 ? 0.0 : T / static_cast<double>(steps);

  RealVector z(2 * n);
  z << s0.q, s0.p;

  ShTrajectory out;
  auto record = [&](long k) {
    out.t.push_back(static_cast<double>(k) * h);
    out.states.push_back({z.head(n), z.tail(n)});
  };
  record(0);
  if (steps == 0) return out;

  auto check = [&](long k) {
    if (!z.allFinite()) throw IntegrationError("non-finite phase-space state", k);
  };

  if (method == Integrator::strang) {
    const BlockMatrix half_a = a_flow(sys.A, 0.5 * h);
    const BlockMatrix step = half_a * b_flow(sys.B, h) * half_a;
    for (long k = 1; k <= steps; ++k) {
      z = step * z;
      check(k);
      if (k % stride == 0 || k == steps) record(k);
    }
  } else {
    const BlockMatrix g = generator(sys);
    for (long k = 1; k <= steps; ++k) {
      const RealVector k1 = g * z;
      const RealVector k2 = g * (z + 0.5 * h * k1);
      const RealVector k3 = g * (z + 0.5 * h * k2);
      const RealVector k4 = g * (z + h * k3);
      z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      check(k);
      if (k % stride == 0 || k == steps) record(k);
    }
  }
  return out;
}

StateVector sh_recombine(const PhaseSpaceState& s) {
  if (s.q.size() != s.p.size()) throw ValidationError("q and p differ in length");
  StateVector psi(s.q.size());
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < s.q.size(); ++i) psi(i) = Complex(s.q(i) * r, s.p(i) * r);
  return psi;
}

PhaseSpaceState sh_split(const StateVector& psi) {
  const double r = std::sqrt(2.0);
  return {psi.real() * r, psi.imag() * r};
}

namespace {

void fix_phase(ComplexMatrix& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < basis.rows(); ++r) {
      if (std::abs(basis(r, c)) > std::abs(basis(best, c)) + 1e-12) best = r;
    }
    const Complex pivot = basis(best, c);
    if (std::abs(pivot) > 0.0) basis.col(c) *= std::conj(pivot) / std::abs(pivot);
  }
}

}  // namespace

NormalModes sh_normal_modes(const HermitianMatrix& H) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H.matrix());
  if (es.info() != Eigen::Success) throw SolverError("eigensolver did not converge");
  NormalModes modes{es.eigenvalues(), es.eigenvectors()};
  fix_phase(modes.basis);
  return modes;
}

Propagator::Propagator(const HermitianMatrix& H) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H.matrix());
  if (es.info() != Eigen::Success) throw SolverError("eigensolver did not converge");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

ComplexMatrix Propagator::unitary(double t) const {
  ComplexVector phase(eigenvalues_.size());
  for (Eigen::Index k = 0; k < phase.size(); ++k) phase(k) = std::polar(1.0, -eigenvalues_(k) * t);
  return eigenvectors_ * phase.asDiagonal() * eigenvectors_.adjoint();
}

StateVector Propagator::apply(const StateVector& psi, double t) const {
  if (psi.size() != eigenvalues_.size()) throw ValidationError("state dimension mismatch");
  ComplexVector coeff = eigenvectors_.adjoint() * psi;
  for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::polar(1.0, -eigenvalues_(k) * t);
  return eigenvectors_ * coeff;
}

StateVector exact_evolve(const HermitianMatrix& H, const StateVector& psi0, double t) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ValidationError("initial state must be normalized", "psi0");
  return Propagator(H).apply(psi0, t);
}

StateVector time_reverse_state(const StateVector& psi, const std::optional<ComplexMatrix>& V) {
  if (!V) return psi.conjugate();
  if (V->rows() != psi.size() || V->cols() != psi.size()) {
    throw ValidationError("V dimension does not match the state");
  }
  return *V * psi.conjugate();
}

ShTrajectory time_reverse(const ShTrajectory& traj) {
  ShTrajectory out;
  const std::size_t n = traj.t.size();
  out.t.reserve(n);
  out.states.reserve(n);
  for (std::size_t k = n; k-- > 0;) {
    out.t.push_back(-traj.t[k] + 0.0);
    out.states.push_back({traj.states[k].q, -traj.states[k].p});
  }
  return out;
}

double hamilton_residual(const SHSystem& sys, const ShTrajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.t.size(); ++k) {
    const double span = traj.t[k + 1] - traj.t[k - 1];
    const RealVector qd = (traj.states[k + 1].q - traj.states[k - 1].q) / span;
    const RealVector pd = (traj.states[k + 1].p - traj.states[k - 1].p) / span;
    const PhaseSpaceState v = sh_velocity(sys, traj.states[k]);
    worst = std::max({worst, (qd - v.q).cwiseAbs().maxCoeff(), (pd - v.p).cwiseAbs().maxCoeff()});
  }
  return worst;
}

}  // namespace stochq::sh
