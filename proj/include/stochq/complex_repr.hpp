#pragma once

#include <Eigen/Dense>

#include <array>
#include <string_view>

namespace stochq::complex_repr {

using Mat2 = Eigen::Matrix2d;

// A complex number x + iy held as the coefficients of the real 2x2 matrices
// 1 = [[1,0],[0,1]] and I = [[0,-1],[1,0]]. No literal `i` appears anywhere:
// all arithmetic is carried out on reals.
struct Mat2C {
  double x = 0.0;
  double y = 0.0;

  // x*1 + y*I = [[x, -y], [y, x]]
  Mat2 render() const;

  friend bool operator==(const Mat2C&, const Mat2C&) = default;
};

inline const Mat2 kOne = Mat2::Identity();
Mat2 linear_complex_structure();  // I, with I*I = -1
Mat2 conjugation_matrix();        // K, represented by sigma_x

Mat2C c2_mul(Mat2C a, Mat2C b);
Mat2C c2_add(Mat2C a, Mat2C b);
Mat2C c2_conj(Mat2C a);
double c2_modulus_sq(Mat2C a);

// Multiplicative inverse; throws DomainError for the zero element.
Mat2C c2_reciprocal(Mat2C a);

// e^{I theta} in closed form: (cos theta, sin theta).
Mat2C c2_exp_rotation(double theta);

// Matrix exponential by Taylor summation. Terms are added until the largest
// entry of a term drops below `cutoff`, capped at `max_terms`.
Mat2 taylor_expm(const Mat2& m, double cutoff = 1e-16, int max_terms = 64);

// Componentwise product (x1*x2, y1*y2). Kept only to show that it is not a
// division algebra: it has zero divisors.
Mat2C entrywise_mul(Mat2C a, Mat2C b);

// Pseudo-quaternions: the group generated by i and K with
// -i^2 = K^2 = (iK)^2 = (i)(K)(iK) = 1 and Ki = -iK.
enum class PqTag { one, i, K, iK };

struct PseudoQuaternionElement {
  PqTag tag = PqTag::one;
  int sign = 1;  // +1 or -1

  friend bool operator==(const PseudoQuaternionElement&,
                         const PseudoQuaternionElement&) = default;
};

PseudoQuaternionElement pq_mul(PseudoQuaternionElement a, PseudoQuaternionElement b);

// Real 2x2 image of an element under i -> I, K -> sigma_x.
Mat2 pq_render(PseudoQuaternionElement e);

std::string_view pq_name(PqTag tag);

inline constexpr std::array<PqTag, 4> kPqTags{PqTag::one, PqTag::i, PqTag::K, PqTag::iK};

}  // namespace stochq::complex_repr
