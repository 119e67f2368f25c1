#include "stochq/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace stochq::stochastic {

Distribution::Distribution(RealVector p) : p_(std::move(p)) {
  if (p_.size() == 0) throw ValidationError("distribution is empty", "initial");
  if (!p_.allFinite()) throw ValidationError("distribution has non-finite entries", "initial");
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (p_(i) < -kNegativeClamp) {
      throw ValidationError("distribution entry " + std::to_string(i) + " is negative", "initial");
    }
    if (p_(i) < 0.0) p_(i) = 0.0;
  }
  if (std::abs(p_.sum() - 1.0) > kSumTolerance) {
    std::ostringstream msg;
    msg << "distribution sums to " << p_.sum();
    throw ValidationError(msg.str(), "initial");
  }
}

std::string ViolationReport::summary() const {
  std::ostringstream out;
  out.precision(17);
  if (!square) return "matrix is not square";
  if (!finite) return "matrix has non-finite entries";
  bool first = true;
  for (const auto& c : columns) {
    if (!first) out << "; ";
    first = false;
    out << "column " << c.column + 1 << " sums to " << c.sum;
    if (c.min_entry < -kNegativeClamp) out << " with negative entry " << c.min_entry;
  }
  return out.str();
}

std::variant<TransitionMatrix, ViolationReport> validate(const RealMatrix& gamma, double t,
                                                         double t0) {
  ViolationReport report;
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0) {
    report.square = false;
    return report;
  }
  if (!gamma.allFinite()) {
    report.finite = false;
    return report;
  }
  RealMatrix clamped = gamma;
  for (Eigen::Index j = 0; j < gamma.cols(); ++j) {
    const double sum = gamma.col(j).sum();
    const double lowest = gamma.col(j).minCoeff();
    if (lowest < -kNegativeClamp || std::abs(sum - 1.0) > kSumTolerance) {
      report.columns.push_back({j, sum, lowest});
    }
    clamped.col(j) = clamped.col(j).cwiseMax(0.0);
  }
  if (!report.columns.empty()) return report;
  return TransitionMatrix(TransitionMatrix::Trusted{}, std::move(clamped), t, t0);
}

TransitionMatrix::TransitionMatrix(RealMatrix gamma, double t, double t0) {
  auto result = validate(gamma, t, t0);
  if (auto* bad = std::get_if<ViolationReport>(&result)) {
    throw ValidationError("not column-stochastic: " + bad->summary(), "matrix");
  }
  *this = std::move(std::get<TransitionMatrix>(result));
}

bool is_doubly_stochastic(const RealMatrix& gamma, double tol) {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0) return false;
  if (gamma.minCoeff() < -kNegativeClamp) return false;
  const RealVector rows = gamma.rowwise().sum();
  const RealVector cols = gamma.colwise().sum().transpose();
  return (rows.array() - 1.0).abs().maxCoeff() <= tol && (cols.array() - 1.0).abs().maxCoeff() <= tol;
}

Distribution propagate(const TransitionMatrix& gamma, const Distribution& p0) {
  if (gamma.dim() != p0.size()) throw ValidationError("dimension mismatch in propagate");
  return Distribution(gamma.matrix() * p0.probabilities());
}

TransitionMatrix markov_compose(const std::vector<TransitionMatrix>& chain) {
  if (chain.empty()) throw ValidationError("empty chain");
  RealMatrix product = chain.front().matrix();
  for (std::size_t k = 1; k < chain.size(); ++k) {
    if (chain[k].dim() != chain[k - 1].dim()) throw ValidationError("dimension mismatch in chain");
    if (chain[k].t0() != chain[k - 1].t()) {
      std::ostringstream msg;
      msg << "time-stamp mismatch at link " << k << ": t0 = " << chain[k].t0()
          << " does not continue t = " << chain[k - 1].t();
      throw ValidationError(msg.str());
    }
    product = chain[k].matrix() * product;
  }
  return TransitionMatrix(std::move(product), chain.back().t(), chain.front().t0());
}

RealMatrix pairwise_joint(const TransitionMatrix& gamma, const Distribution& p0) {
  if (gamma.dim() != p0.size()) throw ValidationError("dimension mismatch in pairwise_joint");
  return gamma.matrix() * p0.probabilities().asDiagonal();
}

std::string to_string(Divisibility d) {
  switch (d) {
    case Divisibility::divisible: return "divisible";
    case Divisibility::indivisible: return "indivisible";
    case Divisibility::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

DivisibilityVerdict divisibility_check(const TransitionMatrix& gamma_t,
                                       const TransitionMatrix& gamma_tp,
                                       const DivisibilityOptions& options) {
  const Eigen::Index n = gamma_t.dim();
  if (gamma_tp.dim() != n) throw ValidationError("transition matrices differ in dimension");
  if (gamma_t.t0() != gamma_tp.t0()) throw ValidationError("transition matrices do not share t0");

  DivisibilityVerdict verdict;
  if (n == 1) {
    verdict.status = Divisibility::divisible;
    verdict.witness = RealMatrix::Ones(1, 1);
    return verdict;
  }

  // Unknown M_ij stored column-major: variable index i + n j.
  const Eigen::Index vars = n * n;
  const RealMatrix& target = gamma_t.matrix();
  const RealMatrix& middle = gamma_tp.matrix();

  lp::FeasibilityProblem problem;
  problem.variables = vars;
  // (M Gamma')_ik = sum_j M_ij Gamma'_jk, each relaxed to +-relaxation.
  problem.less_equal.A = RealMatrix::Zero(2 * vars, vars);
  problem.less_equal.b = RealVector::Zero(2 * vars);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index row = i + n * k;
      for (Eigen::Index j = 0; j < n; ++j) {
        problem.less_equal.A(2 * row, i + n * j) = middle(j, k);
        problem.less_equal.A(2 * row + 1, i + n * j) = -middle(j, k);
      }
      problem.less_equal.b(2 * row) = target(i, k) + options.relaxation;
      problem.less_equal.b(2 * row + 1) = -target(i, k) + options.relaxation;
    }
  }
  // Column sums of M are exact.
  problem.equal.A = RealMatrix::Zero(n, vars);
  problem.equal.b = RealVector::Ones(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) problem.equal.A(j, i + n * j) = 1.0;
  }

  lp::SimplexOptions lp_options;
  lp_options.max_pivots = options.max_pivots;
  const lp::LpResult lp = lp::solve_feasibility(problem, lp_options);
  verdict.pivots = lp.pivots;

  std::ostringstream cert;
  cert.precision(17);
  switch (lp.status) {
    case lp::LpStatus::iteration_limit:
      verdict.status = Divisibility::indeterminate;
      verdict.residual = lp.phase1_objective;
      cert << "pivot cap of " << options.max_pivots << " reached before phase 1 terminated";
      verdict.certificate = cert.str();
      return verdict;
    case lp::LpStatus::infeasible:
      verdict.status = Divisibility::indivisible;
      verdict.residual = lp.phase1_objective;
      cert << "phase-1 simplex optimum " << lp.phase1_objective
           << " > 0: no column-stochastic M satisfies M Gamma(t'<-t0) = Gamma(t<-t0) within "
           << options.relaxation;
      verdict.certificate = cert.str();
      return verdict;
    case lp::LpStatus::feasible:
      break;
  }

  RealMatrix M = Eigen::Map<const RealMatrix>(lp.x.data(), n, n);
  for (Eigen::Index j = 0; j < n; ++j) M.col(j) /= M.col(j).sum();
  verdict.residual = max_abs(RealMatrix(M * middle - target));
  auto valid = validate(M, gamma_t.t(), gamma_tp.t());
  if (verdict.residual > options.witness_tolerance || std::holds_alternative<ViolationReport>(valid)) {
    verdict.status = Divisibility::indeterminate;
    cert << "phase 1 reported feasibility but the recovered witness has residual " << verdict.residual;
    verdict.certificate = cert.str();
    return verdict;
  }
  verdict.status = Divisibility::divisible;
  verdict.witness = std::get<TransitionMatrix>(valid).matrix();
  return verdict;
}

IndivisibleProcess::IndivisibleProcess(Eigen::Index n, std::vector<double> targets,
                                       std::vector<double> conditioning,
                                       std::vector<TransitionMatrix> transitions,
                                       Distribution initial)
    : n_(n),
      targets_(std::move(targets)),
      conditioning_(std::move(conditioning)),
      initial_(std::move(initial)) {
  if (n_ < 1) throw ValidationError("n must be positive", "n");
  if (initial_.size() != n_) throw ValidationError("initial distribution has wrong length", "initial");
  auto in = [](const std::vector<double>& grid, double v) {
    return std::find(grid.begin(), grid.end(), v) != grid.end();
  };
  for (double t0 : conditioning_) {
    if (!in(targets_, t0)) throw ValidationError("conditioning time not among targets", "conditioning");
  }
  for (auto& tm : transitions) {
    if (tm.dim() != n_) throw ValidationError("transition matrix has wrong dimension", "transitions");
    if (!in(targets_, tm.t())) throw ValidationError("transition t not among targets", "transitions");
    if (!in(conditioning_, tm.t0())) {
      throw ValidationError("transition t0 not among conditioning times", "transitions");
    }
    const std::pair<double, double> key{tm.t(), tm.t0()};
    if (!transitions_.emplace(key, std::move(tm)).second) {
      throw ValidationError("duplicate transition for the same (t, t0)", "transitions");
    }
  }
}

const TransitionMatrix& IndivisibleProcess::at(double t, double t0) const {
  auto it = transitions_.find({t, t0});
  if (it == transitions_.end()) {
    std::ostringstream msg;
    msg << "no transition stored for (t = " << t << ", t0 = " << t0 << ")";
    throw std::out_of_range(msg.str());
  }
  return it->second;
}

std::vector<ProcessCheck> check_process(const IndivisibleProcess& process,
                                        const DivisibilityOptions& options, int jobs) {
  std::vector<ProcessCheck> checks;
  for (const auto& [outer, gamma_t] : process.transitions()) {
    for (const auto& [inner, gamma_tp] : process.transitions()) {
      const auto [t, t0] = outer;
      const auto [tm, tm0] = inner;
      if (tm0 != t0) continue;
      const bool between = (t0 < tm && tm < t) || (t < tm && tm < t0);
      if (between) checks.push_back({t, tm, t0, {}});
    }
  }
  auto work = [&](std::size_t k) {
    auto& c = checks[k];
    c.verdict = divisibility_check(process.at(c.t, c.t0), process.at(c.t_mid, c.t0), options);
  };
  const std::size_t threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                                                      std::max<std::size_t>(checks.size(), 1));
  if (threads == 1) {
    for (std::size_t k = 0; k < checks.size(); ++k) work(k);
    return checks;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < checks.size(); k += threads) work(k);
    });
  }
  for (auto& th : pool) th.join();
  return checks;
}

}  // namespace stochq::stochastic
