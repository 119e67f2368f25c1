#pragma once

#include "stochq/types.hpp"

#include <random>

namespace stochq::random {

using Rng = std::mt19937_64;

// Haar-distributed: QR of a complex Ginibre matrix with R's diagonal phases
// absorbed into Q.
ComplexMatrix unitary(Eigen::Index n, Rng& rng);

// (G + G^dagger) / 2 for complex Gaussian G, scaled to spectral radius `scale`.
ComplexMatrix hermitian(Eigen::Index n, Rng& rng, double scale = 1.0);

// Columns drawn uniformly from the probability simplex.
RealMatrix column_stochastic(Eigen::Index n, Rng& rng);

RealVector distribution(Eigen::Index n, Rng& rng);

ComplexVector unit_vector(Eigen::Index n, Rng& rng);

}  // namespace stochq::random
