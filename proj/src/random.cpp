#include "stochq/random.hpp"

#include <cmath>

namespace stochq::random {

namespace {

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

}  // namespace

ComplexMatrix unitary(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(ginibre(n, n, rng));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

ComplexMatrix hermitian(Eigen::Index n, Rng& rng, double scale) {
  const ComplexMatrix g = ginibre(n, n, rng);
  ComplexMatrix h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 0.0) h *= scale / radius;
  return h;
}

RealVector distribution(Eigen::Index n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  RealVector p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = expo(rng);
  p /= p.sum();
  // Push the rounding residue into the largest entry so the sum is 1 to the ulp.
  Eigen::Index big = 0;
  p.maxCoeff(&big);
  p(big) += 1.0 - p.sum();
  return p;
}

RealMatrix column_stochastic(Eigen::Index n, Rng& rng) {
  RealMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) m.col(j) = distribution(n, rng);
  return m;
}

ComplexVector unit_vector(Eigen::Index n, Rng& rng) {
  ComplexVector v = ginibre(n, 1, rng).col(0);
  return v / v.norm();
}

}  // namespace stochq::random
