#pragma once

#include "stochq/sh_sim.hpp"
#include "stochq/stochastic.hpp"
#include "stochq/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace stochq::correspondence {

using stochastic::Distribution;
using stochastic::TransitionMatrix;
using StateVector = ComplexVector;

inline constexpr double kUnitaryTolerance = 1e-10;
inline constexpr double kColumnNormTolerance = 1e-12;

// Complex matrix Theta whose columns have unit 2-norm, so |Theta_ij|^2 is
// column-stochastic.
class PotentialMatrix {
public:
  explicit PotentialMatrix(ComplexMatrix theta);

  const ComplexMatrix& matrix() const { return theta_; }
  Eigen::Index dim() const { return theta_.rows(); }

private:
  ComplexMatrix theta_;
};

// Time-evolution operator U(t <- t0) with U^dagger U = 1 within 1e-10.
class UnitaryMatrix {
public:
  explicit UnitaryMatrix(ComplexMatrix u, double t = 0.0, double t0 = 0.0);

  const ComplexMatrix& matrix() const { return u_; }
  Eigen::Index dim() const { return u_.rows(); }
  double t() const { return t_; }
  double t0() const { return t0_; }

private:
  ComplexMatrix u_;
  double t_ = 0.0;
  double t0_ = 0.0;
};

double unitarity_defect(const ComplexMatrix& u);

// Operators with sum_b K_b^dagger K_b = 1 within 1e-10.
class KrausSet {
public:
  explicit KrausSet(std::vector<ComplexMatrix> ops);

  const std::vector<ComplexMatrix>& operators() const { return ops_; }
  Eigen::Index dim() const { return ops_.front().rows(); }
  std::size_t size() const { return ops_.size(); }

private:
  std::vector<ComplexMatrix> ops_;
};

double kraus_identity_residual(const std::vector<ComplexMatrix>& ops);

// Hermitian, trace one, eigenvalues >= -1e-10.
class DensityMatrix {
public:
  explicit DensityMatrix(ComplexMatrix rho);

  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

private:
  ComplexMatrix rho_;
};

// Gamma_ij = |U_ij|^2; doubly stochastic.
TransitionMatrix quantum_to_stochastic(const UnitaryMatrix& U);

// Theta_ij = sqrt(Gamma_ij) exp(i phases_ij).
PotentialMatrix potential_from_transition(const TransitionMatrix& gamma, const RealMatrix& phases);

enum class SearchOutcome {
  found,               // unitary completion located
  not_unistochastic,   // proven: not doubly stochastic, or overlap certificate
  no_completion_found  // heuristic search failed; not a proof
};

std::string to_string(SearchOutcome o);

struct UnistochasticOptions {
  long max_iters = 20000;  // gradient steps per start
  double tol = 1e-10;      // on ||Theta Theta^dagger - 1||_F
  int starts = 32;
  std::uint64_t seed = 42;
};

struct UnistochasticResult {
  SearchOutcome outcome = SearchOutcome::no_completion_found;
  std::optional<UnitaryMatrix> unitary;
  double best_residual = 0.0;
  int starts_used = 0;
  std::string certificate;  // reason when outcome != found
};

// Orthogonality of two rows or columns of U needs sum_i a_i e^{i alpha_i} = 0
// with a_i = sqrt(Gamma_ij Gamma_ik); impossible once one a_i exceeds the sum
// of the others. Returns a description of the first such pair, if any.
std::optional<std::string> overlap_certificate(const RealMatrix& gamma);

// Multi-start gradient descent over the phases of Theta. The first start uses
// zero phases, the rest draw uniform phases from a generator seeded with
// options.seed.
UnistochasticResult unistochastic_search(const TransitionMatrix& gamma,
                                         const UnistochasticOptions& options = {});

// Objective ||Theta Theta^dagger - 1||_F^2 and its gradient with respect to
// the phases (exposed for testing).
double phase_objective(const RealMatrix& amplitudes, const RealMatrix& phases, RealMatrix* gradient);

inline constexpr Eigen::Index kMaxOrthostochasticDim = 4;

struct OrthostochasticResult {
  std::optional<RealMatrix> orthogonal;
  std::string reason;  // when not found
};

// Exhaustive search over sign patterns of +-sqrt(Gamma_ij), pruned column by
// column; definitive. Throws DomainError for N > 4.
OrthostochasticResult orthostochastic_check(const TransitionMatrix& gamma);

// (K_b)_{ib} = Theta_{ib}, all other entries zero.
KrausSet kraus_from_potential(const PotentialMatrix& theta);

// sum_b |K_b,ij|^2
RealMatrix kraus_transition(const KrausSet& kraus);

struct Dilation {
  UnitaryMatrix unitary;
  Eigen::Index system_dim = 0;
  Eigen::Index ancilla_dim = 0;
  Eigen::Index ancilla_input = 0;  // zero-based index of the fixed ancilla state

  // Composite index of |i> (x) |b>.
  Eigen::Index index(Eigen::Index i, Eigen::Index b) const { return i * ancilla_dim + b; }
};

// Isometry |j> -> sum_b K_b|j> (x) |b> placed at ancilla input 0 and completed
// to a unitary on the N * r dimensional space by Gram-Schmidt over the
// standard basis.
Dilation stinespring_dilate(const KrausSet& kraus);

// sum_b |<i,b| U |j,a0>|^2
RealMatrix dilation_marginal(const Dilation& d);

DensityMatrix density_from_distribution(const Distribution& p);

DensityMatrix evolve_density(const UnitaryMatrix& U, const DensityMatrix& rho);

struct NotRankOne {
  RealVector spectrum;  // ascending
};

// Dominant eigenvector when the second-largest eigenvalue is <= 1e-10, with
// its first nonzero component made real and positive.
std::variant<StateVector, NotRankOne> rank_one_factor(const DensityMatrix& rho);

struct ExtractedHamiltonian {
  sh::HermitianMatrix H;
  double anti_hermitian_residual = 0.0;  // max |H_raw - H_raw^dagger| / 2
};

using Evolution = std::function<UnitaryMatrix(double)>;

// H = i (U(t+dt) - U(t-dt)) / (2 dt) U(t)^dagger, symmetrized.
ExtractedHamiltonian hamiltonian_from_evolution(const Evolution& evolution, double t, double dt);

}  // namespace stochq::correspondence
