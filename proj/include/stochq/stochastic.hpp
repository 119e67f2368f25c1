#pragma once

#include "stochq/simplex.hpp"
#include "stochq/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace stochq::stochastic {

inline constexpr double kSumTolerance = 1e-12;
inline constexpr double kNegativeClamp = 1e-14;

// Probability vector: non-negative entries summing to 1 within 1e-12.
class Distribution {
public:
  explicit Distribution(RealVector p);

  const RealVector& probabilities() const { return p_; }
  Eigen::Index size() const { return p_.size(); }
  double operator[](Eigen::Index i) const { return p_(i); }

private:
  RealVector p_;
};

struct ColumnViolation {
  Eigen::Index column = 0;  // zero-based
  double sum = 0.0;
  double min_entry = 0.0;
};

struct ViolationReport {
  bool square = true;
  bool finite = true;
  std::vector<ColumnViolation> columns;

  std::string summary() const;
};

// Column-stochastic N x N matrix Gamma(t <- t0).
class TransitionMatrix {
public:
  // Throws ValidationError with the violation summary.
  TransitionMatrix(RealMatrix gamma, double t = 0.0, double t0 = 0.0);

  const RealMatrix& matrix() const { return gamma_; }
  Eigen::Index dim() const { return gamma_.rows(); }
  double t() const { return t_; }
  double t0() const { return t0_; }

private:
  struct Trusted {};
  TransitionMatrix(Trusted, RealMatrix gamma, double t, double t0)
      : gamma_(std::move(gamma)), t_(t), t0_(t0) {}
  friend std::variant<TransitionMatrix, ViolationReport> validate(const RealMatrix&, double, double);

  RealMatrix gamma_;
  double t_ = 0.0;
  double t0_ = 0.0;
};

// Accepts iff every entry is >= -1e-14 (such entries are clamped to 0) and
// every column sums to 1 within 1e-12. Nothing else is repaired.
std::variant<TransitionMatrix, ViolationReport> validate(const RealMatrix& gamma, double t = 0.0,
                                                         double t0 = 0.0);

bool is_doubly_stochastic(const RealMatrix& gamma, double tol = kSumTolerance);

// p_i(t) = sum_j Gamma_ij p_j(t0)
Distribution propagate(const TransitionMatrix& gamma, const Distribution& p0);

// Product Gamma_k ... Gamma_1 of chain = [Gamma_1(t1 <- t0), Gamma_2(t2 <- t1), ...].
TransitionMatrix markov_compose(const std::vector<TransitionMatrix>& chain);

// J_ij = Gamma_ij p_j(t0): joint probability of i at t and j at t0.
RealMatrix pairwise_joint(const TransitionMatrix& gamma, const Distribution& p0);

enum class Divisibility { divisible, indivisible, indeterminate };

std::string to_string(Divisibility d);

struct DivisibilityOptions {
  // Half-width of the band each product equality M Gamma' = Gamma is relaxed to.
  double relaxation = 1e-10;
  // Bound on max |M Gamma' - Gamma| for a witness to be accepted.
  double witness_tolerance = 1e-9;
  long max_pivots = 1'000'000;
};

struct DivisibilityVerdict {
  Divisibility status = Divisibility::indeterminate;
  std::optional<RealMatrix> witness;      // when divisible
  std::optional<std::string> certificate; // when indivisible or indeterminate
  double residual = 0.0;                  // witness residual, or phase-1 minimum
  long pivots = 0;
};

// Decides whether a column-stochastic M exists with M gamma_tp = gamma_t.
// Both matrices must share the conditioning time t0.
DivisibilityVerdict divisibility_check(const TransitionMatrix& gamma_t,
                                       const TransitionMatrix& gamma_tp,
                                       const DivisibilityOptions& options = {});

// Transition maps keyed by exact (t, t0) pairs, only for t in targets and t0
// in conditioning. The map may be partial.
class IndivisibleProcess {
public:
  IndivisibleProcess(Eigen::Index n, std::vector<double> targets, std::vector<double> conditioning,
                     std::vector<TransitionMatrix> transitions, Distribution initial);

  Eigen::Index n() const { return n_; }
  const std::vector<double>& targets() const { return targets_; }
  const std::vector<double>& conditioning() const { return conditioning_; }
  const Distribution& initial() const { return initial_; }
  const std::map<std::pair<double, double>, TransitionMatrix>& transitions() const {
    return transitions_;
  }

  bool has(double t, double t0) const { return transitions_.contains({t, t0}); }
  // Throws std::out_of_range when (t, t0) is not stored.
  const TransitionMatrix& at(double t, double t0) const;

private:
  Eigen::Index n_;
  std::vector<double> targets_;
  std::vector<double> conditioning_;
  std::map<std::pair<double, double>, TransitionMatrix> transitions_;
  Distribution initial_;
};

struct ProcessCheck {
  double t = 0.0;
  double t_mid = 0.0;
  double t0 = 0.0;
  DivisibilityVerdict verdict;
};

// Every triple with stored Gamma(t <- t0), Gamma(t' <- t0) and t' strictly
// between t0 and t. Independent checks run on up to `jobs` threads; the
// result order does not depend on `jobs`.
std::vector<ProcessCheck> check_process(const IndivisibleProcess& process,
                                        const DivisibilityOptions& options = {}, int jobs = 1);

}  // namespace stochq::stochastic
