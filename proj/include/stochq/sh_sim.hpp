#pragma once

#include "stochq/types.hpp"

#include <optional>
#include <vector>

namespace stochq::sh {

inline constexpr double kHermitianTolerance = 1e-12;

// Complex N x N matrix with H = H^dagger to within 1e-12 entrywise.
class HermitianMatrix {
public:
  // Throws ValidationError carrying max |H - H^dagger| when the input is not
  // Hermitian. With `symmetrize` the input is replaced by (H + H^dagger) / 2
  // instead; repair never happens implicitly.
  explicit HermitianMatrix(ComplexMatrix h, bool symmetrize = false);

  const ComplexMatrix& matrix() const { return h_; }
  Eigen::Index dim() const { return h_.rows(); }

private:
  ComplexMatrix h_;
};

double hermiticity_defect(const ComplexMatrix& h);

// H = A + iB with A symmetric and B antisymmetric, both exactly as stored.
struct SHSystem {
  RealMatrix A;
  RealMatrix B;

  SHSystem(RealMatrix a, RealMatrix b);
  Eigen::Index dim() const { return A.rows(); }
};

struct PhaseSpaceState {
  RealVector q;
  RealVector p;
};

using StateVector = ComplexVector;

SHSystem sh_decompose(const HermitianMatrix& H);
ComplexMatrix sh_recompose(const SHSystem& sys);

// Phase-space energy
//   1/2 p^T A p + 1/2 q^T A q + sum_kl B_lk q_k p_l
// which equals <Psi|H|Psi> for Psi = (q + ip)/sqrt(2).
double sh_energy(const SHSystem& sys, const PhaseSpaceState& s);

// Hamilton's equations: qd = dH/dp = A p + B q, pd = -dH/dq = -A q + B p.
PhaseSpaceState sh_velocity(const SHSystem& sys, const PhaseSpaceState& s);

enum class Integrator {
  strang,  // exact A-flow / B-flow sub-steps, symmetric splitting
  rk4,
};

struct ShTrajectory {
  std::vector<double> t;
  std::vector<PhaseSpaceState> states;
};

// Integrates Hamilton's equations with ceil(T / dt) uniform steps. Every
// `stride`-th state is recorded, plus the first and the last.
ShTrajectory sh_integrate(const SHSystem& sys, const PhaseSpaceState& s0, double dt, double T,
                          Integrator method = Integrator::strang, long stride = 1);

StateVector sh_recombine(const PhaseSpaceState& s);
PhaseSpaceState sh_split(const StateVector& psi);

struct NormalModes {
  RealVector frequencies;  // ascending eigenvalues of H
  ComplexMatrix basis;     // columns: orthonormal eigenvectors
};

// Each eigenvector is phase-fixed so its first largest-magnitude component is
// real and positive.
NormalModes sh_normal_modes(const HermitianMatrix& H);

// exp(-iHt) via a cached eigendecomposition.
class Propagator {
public:
  explicit Propagator(const HermitianMatrix& H);

  ComplexMatrix unitary(double t) const;
  StateVector apply(const StateVector& psi, double t) const;

private:
  RealVector eigenvalues_;
  ComplexMatrix eigenvectors_;
};

// Requires ||psi0|| = 1 within 1e-10.
StateVector exact_evolve(const HermitianMatrix& H, const StateVector& psi0, double t);

// Psi -> V K Psi. Without V this is plain entrywise conjugation; the caller
// supplies the accompanying t -> -t.
StateVector time_reverse_state(const StateVector& psi,
                               const std::optional<ComplexMatrix>& V = std::nullopt);

// q(t) -> q(-t), p(t) -> -p(-t)
ShTrajectory time_reverse(const ShTrajectory& traj);

// Max central-difference residual of Hamilton's equations over interior samples.
double hamilton_residual(const SHSystem& sys, const ShTrajectory& traj);

}  // namespace stochq::sh
