#include "stochq/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace stochq::correspondence {

namespace {

ComplexMatrix identity_like(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

ComplexMatrix phased(const RealMatrix& amplitudes, const RealMatrix& phases) {
  const Eigen::Index n = amplitudes.rows();
  ComplexMatrix theta(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) theta(i, j) = std::polar(amplitudes(i, j), phases(i, j));
  }
  return theta;
}

// Levenberg-Marquardt on the real and imaginary parts of Theta Theta^dagger - 1.
// Converges quadratically near an exact completion, where plain gradient
// steps crawl.
double polish(const RealMatrix& amplitudes, RealMatrix& phases, long iters, double target) {
  const Eigen::Index n = amplitudes.rows();
  const Eigen::Index m = n * n;
  auto residual = [&](const ComplexMatrix& theta) {
    const ComplexMatrix E = theta * theta.adjoint() - identity_like(n);
    RealVector r(2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
      r(2 * k) = E.reshaped()(k).real();
      r(2 * k + 1) = E.reshaped()(k).imag();
    }
    return r;
  };
  const Complex I1(0.0, 1.0);
  ComplexMatrix theta = phased(amplitudes, phases);
  RealVector r = residual(theta);
  double f = r.squaredNorm();
  double lambda = 1e-3;
  for (long it = 0; it < iters && f >= target; ++it) {
    // d(Theta Theta^dagger)_kl / d phi_ij = i [k=i] Theta_ij conj(Theta_lj) - i [l=i] Theta_kj conj(Theta_ij)
    RealMatrix J = RealMatrix::Zero(2 * m, m);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index param = i + n * j;
        for (Eigen::Index l = 0; l < n; ++l) {
          const Complex d = I1 * theta(i, j) * std::conj(theta(l, j));
          const Eigen::Index a = i + n * l;  // entry (i, l)
          const Eigen::Index b = l + n * i;  // entry (l, i), the conjugate term
          J(2 * a, param) += d.real();
          J(2 * a + 1, param) += d.imag();
          J(2 * b, param) += d.real();
          J(2 * b + 1, param) -= d.imag();
        }
      }
    }
    const RealMatrix JtJ = J.transpose() * J;
    const RealVector g = J.transpose() * r;
    bool improved = false;
    while (lambda < 1e12) {
      RealMatrix A = JtJ;
      A.diagonal().array() += lambda;
      const RealVector delta = A.ldlt().solve(-g);
      RealMatrix trial = phases + delta.reshaped(n, n);
      const ComplexMatrix trial_theta = phased(amplitudes, trial);
      const RealVector trial_r = residual(trial_theta);
      const double ft = trial_r.squaredNorm();
      if (ft < f) {
        phases = std::move(trial);
        theta = trial_theta;
        r = trial_r;
        f = ft;
        lambda = std::max(lambda / 3.0, 1e-15);
        improved = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) break;
  }
  return f;
}

}  // namespace

PotentialMatrix::PotentialMatrix(ComplexMatrix theta) : theta_(std::move(theta)) {
  if (theta_.rows() != theta_.cols() || theta_.rows() == 0) {
    throw ValidationError("potential matrix must be square", "re");
  }
  for (Eigen::Index j = 0; j < theta_.cols(); ++j) {
    const double norm_sq = theta_.col(j).squaredNorm();
    if (std::abs(norm_sq - 1.0) > kColumnNormTolerance) {
      std::ostringstream msg;
      msg << "column " << j + 1 << " of the potential matrix has squared norm " << norm_sq;
      throw ValidationError(msg.str(), "re");
    }
  }
}

double unitarity_defect(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return max_abs(ComplexMatrix(u.adjoint() * u - identity_like(u.rows())));
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix u, double t, double t0) : u_(std::move(u)), t_(t), t0_(t0) {
  if (u_.rows() != u_.cols() || u_.rows() == 0) throw ValidationError("unitary must be square", "re");
  const double defect = unitarity_defect(u_);
  if (!(defect <= kUnitaryTolerance)) {
    std::ostringstream msg;
    msg << "matrix is not unitary: max |U^dagger U - 1| = " << defect;
    throw ValidationError(msg.str(), "re");
  }
}

double kraus_identity_residual(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) return INFINITY;
  ComplexMatrix sum = ComplexMatrix::Zero(ops.front().cols(), ops.front().cols());
  for (const auto& k : ops) sum += k.adjoint() * k;
  return max_abs(ComplexMatrix(sum - identity_like(sum.rows())));
}

KrausSet::KrausSet(std::vector<ComplexMatrix> ops) : ops_(std::move(ops)) {
  if (ops_.empty()) throw ValidationError("Kraus set is empty", "kraus");
  const Eigen::Index n = ops_.front().rows();
  for (const auto& k : ops_) {
    if (k.rows() != n || k.cols() != n) throw ValidationError("Kraus operators must be N x N", "kraus");
  }
  const double r = kraus_identity_residual(ops_);
  if (!(r <= kUnitaryTolerance)) {
    std::ostringstream msg;
    msg << "Kraus identity violated: max |sum K^dagger K - 1| = " << r;
    throw ValidationError(msg.str(), "kraus");
  }
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw ValidationError("density matrix must be square", "re");
  if (sh::hermiticity_defect(rho_) > 1e-12) throw ValidationError("density matrix is not Hermitian", "im");
  if (std::abs(rho_.trace() - Complex(1.0, 0.0)) > 1e-12) {
    throw ValidationError("density matrix trace differs from 1", "re");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw ValidationError("density matrix is not positive", "re");
}

TransitionMatrix quantum_to_stochastic(const UnitaryMatrix& U) {
  return TransitionMatrix(U.matrix().cwiseAbs2(), U.t(), U.t0());
}

PotentialMatrix potential_from_transition(const TransitionMatrix& gamma, const RealMatrix& phases) {
  const Eigen::Index n = gamma.dim();
  if (phases.rows() != n || phases.cols() != n) throw ValidationError("phase matrix has wrong shape", "phases");
  ComplexMatrix theta(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) theta(i, j) = std::polar(std::sqrt(gamma.matrix()(i, j)), phases(i, j));
  }
  return PotentialMatrix(std::move(theta));
}

std::string to_string(SearchOutcome o) {
  switch (o) {
    case SearchOutcome::found: return "found";
    case SearchOutcome::not_unistochastic: return "not_unistochastic";
    case SearchOutcome::no_completion_found: return "no_completion_found";
  }
  return "no_completion_found";
}

std::optional<std::string> overlap_certificate(const RealMatrix& gamma) {
  const Eigen::Index n = gamma.rows();
  auto check = [&](auto&& entry, const char* kind) -> std::optional<std::string> {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = j + 1; k < n; ++k) {
        double total = 0.0;
        double largest = 0.0;
        Eigen::Index at = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          const double a = std::sqrt(std::max(0.0, entry(i, j)) * std::max(0.0, entry(i, k)));
          total += a;
          if (a > largest) {
            largest = a;
            at = i;
          }
        }
        if (largest > (total - largest) + 1e-12) {
          std::ostringstream msg;
          msg.precision(17);
          msg << kind << "s " << j + 1 << " and " << k + 1 << " cannot be orthogonal: overlap term "
              << largest << " at index " << at + 1 << " exceeds the sum " << total - largest
              << " of the others";
          return msg.str();
        }
      }
    }
    return std::nullopt;
  };
  if (auto c = check([&](Eigen::Index i, Eigen::Index j) { return gamma(i, j); }, "column")) return c;
  return check([&](Eigen::Index i, Eigen::Index j) { return gamma(j, i); }, "row");
}

double phase_objective(const RealMatrix& amplitudes, const RealMatrix& phases, RealMatrix* gradient) {
  const Eigen::Index n = amplitudes.rows();
  const ComplexMatrix theta = phased(amplitudes, phases);
  const ComplexMatrix E = theta * theta.adjoint() - identity_like(n);
  if (gradient) {
    // d/dphi_ij ||E||_F^2 = 4 Im(conj(Theta_ij) (E Theta)_ij)
    const ComplexMatrix et = E * theta;
    *gradient = 4.0 * (theta.conjugate().cwiseProduct(et)).imag();
  }
  return E.squaredNorm();
}

namespace {
constexpr long kPolishIterations = 200;
}

UnistochasticResult unistochastic_search(const TransitionMatrix& gamma, const UnistochasticOptions& options) {
  UnistochasticResult result;
  const RealMatrix& g = gamma.matrix();
  const Eigen::Index n = gamma.dim();
  if (!stochastic::is_doubly_stochastic(g)) {
    result.outcome = SearchOutcome::not_unistochastic;
    result.certificate = "matrix is not doubly stochastic";
    return result;
  }
  if (auto cert = overlap_certificate(g)) {
    result.outcome = SearchOutcome::not_unistochastic;
    result.certificate = *cert;
    return result;
  }

  const RealMatrix amplitudes = g.cwiseSqrt();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double target = options.tol * options.tol;
  result.best_residual = INFINITY;

  for (int start = 0; start < options.starts; ++start) {
    RealMatrix phases = RealMatrix::Zero(n, n);
    if (start > 0) {
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) phases(i, j) = angle(rng);
      }
    }
    result.starts_used = start + 1;
    RealMatrix grad;
    double f = phase_objective(amplitudes, phases, &grad);
    double step = 0.1;
    for (long it = 0; it < options.max_iters && f >= target; ++it) {
      const RealMatrix trial = phases - step * grad;
      RealMatrix trial_grad;
      const double ft = phase_objective(amplitudes, trial, &trial_grad);
      if (ft < f) {
        phases = trial;
        grad = std::move(trial_grad);
        f = ft;
        step *= 1.25;
      } else {
        step *= 0.5;
        if (step < 1e-18) break;
      }
    }
    if (f >= target) f = polish(amplitudes, phases, std::min(kPolishIterations, options.max_iters), target);
    result.best_residual = std::min(result.best_residual, std::sqrt(f));
    if (f < target) {
      ComplexMatrix u = phased(amplitudes, phases);
      result.outcome = SearchOutcome::found;
      result.unitary.emplace(std::move(u), gamma.t(), gamma.t0());
      result.best_residual = std::sqrt(f);
      return result;
    }
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "no unitary completion found in " << options.starts << " starts; best ||Theta Theta^dagger - 1||_F = "
      << result.best_residual;
  result.certificate = msg.str();
  return result;
}

namespace {

class SignSearch {
public:
  explicit SignSearch(const RealMatrix& gamma) : amp_(gamma.cwiseSqrt()), n_(gamma.rows()), o_(n_, n_) {}

  bool run(Eigen::Index col = 0) {
    if (col == n_) return true;
    for (unsigned mask = 0; mask < (1u << n_); ++mask) {
      if (!canonical(col, mask)) continue;
      for (Eigen::Index i = 0; i < n_; ++i) o_(i, col) = (mask >> i & 1u) ? -amp_(i, col) : amp_(i, col);
      bool orthogonal = true;
      for (Eigen::Index prev = 0; prev < col && orthogonal; ++prev) {
        orthogonal = std::abs(o_.col(prev).dot(o_.col(col))) <= 1e-9;
      }
      if (orthogonal && run(col + 1)) return true;
    }
    return false;
  }

  const RealMatrix& result() const { return o_; }

private:
  // Column sign flips preserve orthogonality: the first nonzero entry stays
  // positive. Zero entries carry no sign.
  bool canonical(Eigen::Index col, unsigned mask) const {
    bool seen_nonzero = false;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const bool negative = mask >> i & 1u;
      if (amp_(i, col) == 0.0) {
        if (negative) return false;
        continue;
      }
      if (!seen_nonzero && negative) return false;
      seen_nonzero = true;
    }
    return true;
  }

  RealMatrix amp_;
  Eigen::Index n_;
  RealMatrix o_;
};

}  // namespace

OrthostochasticResult orthostochastic_check(const TransitionMatrix& gamma) {
  if (gamma.dim() > kMaxOrthostochasticDim) {
    throw DomainError("orthostochastic sign search supports N <= 4, got N = " + std::to_string(gamma.dim()));
  }
  OrthostochasticResult result;
  if (!stochastic::is_doubly_stochastic(gamma.matrix())) {
    result.reason = "matrix is not doubly stochastic";
    return result;
  }
  SignSearch search(gamma.matrix());
  if (search.run()) {
    result.orthogonal = search.result();
  } else {
    result.reason = "no sign pattern of +-sqrt(Gamma_ij) gives an orthogonal matrix";
  }
  return result;
}

KrausSet kraus_from_potential(const PotentialMatrix& theta) {
  const Eigen::Index n = theta.dim();
  std::vector<ComplexMatrix> ops;
  ops.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index b = 0; b < n; ++b) {
    ComplexMatrix k = ComplexMatrix::Zero(n, n);
    k.col(b) = theta.matrix().col(b);
    ops.push_back(std::move(k));
  }
  return KrausSet(std::move(ops));
}

RealMatrix kraus_transition(const KrausSet& kraus) {
  RealMatrix g = RealMatrix::Zero(kraus.dim(), kraus.dim());
  for (const auto& k : kraus.operators()) g += k.cwiseAbs2();
  return g;
}

Dilation stinespring_dilate(const KrausSet& kraus) {
  const Eigen::Index n = kraus.dim();
  const Eigen::Index r = static_cast<Eigen::Index>(kraus.size());
  const Eigen::Index total = n * r;
  constexpr Eigen::Index a0 = 0;

  ComplexMatrix u = ComplexMatrix::Zero(total, total);
  std::vector<bool> filled(static_cast<std::size_t>(total), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index c = j * r + a0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index b = 0; b < r; ++b) u(i * r + b, c) = kraus.operators()[b](i, j);
    }
    filled[c] = true;
  }

  // Complete with standard basis vectors, orthogonalized twice against every
  // column placed so far.
  Eigen::Index next_slot = 0;
  auto advance = [&] {
    while (next_slot < total && filled[next_slot]) ++next_slot;
  };
  advance();
  for (Eigen::Index cand = 0; cand < total && next_slot < total; ++cand) {
    ComplexVector v = ComplexVector::Unit(total, cand);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < total; ++c) {
        if (filled[c]) v -= u.col(c) * u.col(c).dot(v);
      }
    }
    const double norm = v.norm();
    if (norm < 1e-3) continue;
    u.col(next_slot) = v / norm;
    filled[next_slot] = true;
    advance();
  }
  if (next_slot < total) throw SolverError("Gram-Schmidt completion ran out of candidates");
  return Dilation{UnitaryMatrix(std::move(u)), n, r, a0};
}

RealMatrix dilation_marginal(const Dilation& d) {
  RealMatrix g = RealMatrix::Zero(d.system_dim, d.system_dim);
  const ComplexMatrix& u = d.unitary.matrix();
  for (Eigen::Index i = 0; i < d.system_dim; ++i) {
    for (Eigen::Index j = 0; j < d.system_dim; ++j) {
      for (Eigen::Index b = 0; b < d.ancilla_dim; ++b) g(i, j) += std::norm(u(d.index(i, b), d.index(j, d.ancilla_input)));
    }
  }
  return g;
}

DensityMatrix density_from_distribution(const Distribution& p) {
  return DensityMatrix(p.probabilities().cast<Complex>().asDiagonal());
}

DensityMatrix evolve_density(const UnitaryMatrix& U, const DensityMatrix& rho) {
  if (U.dim() != rho.dim()) throw ValidationError("dimension mismatch in evolve_density");
  return DensityMatrix(U.matrix() * rho.matrix() * U.matrix().adjoint());
}

std::variant<StateVector, NotRankOne> rank_one_factor(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix());
  if (es.info() != Eigen::Success) throw SolverError("eigensolver did not converge");
  const Eigen::Index n = rho.dim();
  if (n > 1 && es.eigenvalues()(n - 2) > 1e-10) return NotRankOne{es.eigenvalues()};
  StateVector psi = es.eigenvectors().col(n - 1);
  psi.normalize();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(psi(i)) > 1e-10) {
      psi *= std::conj(psi(i)) / std::abs(psi(i));
      psi(i) = Complex(psi(i).real(), 0.0);
      break;
    }
  }
  return psi;
}

ExtractedHamiltonian hamiltonian_from_evolution(const Evolution& evolution, double t, double dt) {
  if (!(dt > 0.0)) throw ValidationError("dt must be positive", "dt");
  const UnitaryMatrix forward = evolution(t + dt);
  const UnitaryMatrix backward = evolution(t - dt);
  const UnitaryMatrix here = evolution(t);
  const ComplexMatrix raw =
      Complex(0.0, 1.0) * (forward.matrix() - backward.matrix()) / (2.0 * dt) * here.matrix().adjoint();
  if (!raw.allFinite()) throw DomainError("non-finite derivative");
  const double anti = 0.5 * sh::hermiticity_defect(raw);
  return {sh::HermitianMatrix(raw, /*symmetrize=*/true), anti};
}

}  // namespace stochq::correspondence
