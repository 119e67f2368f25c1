#include "stochq/complex_repr.hpp"

#include "stochq/types.hpp"

#include <cmath>

namespace stochq::complex_repr {

Mat2 Mat2C::render() const {
  Mat2 m;
  m << x, -y,
       y, x;
  return m;
}

Mat2 linear_complex_structure() {
  Mat2 m;
  m << 0.0, -1.0,
       1.0, 0.0;
  return m;
}

Mat2 conjugation_matrix() {
  Mat2 m;
  m << 0.0, 1.0,
       1.0, 0.0;
  return m;
}

Mat2C c2_mul(Mat2C a, Mat2C b) {
  return {a.x * b.x - a.y * b.y, a.x * b.y + a.y * b.x};
}

Mat2C c2_add(Mat2C a, Mat2C b) { return {a.x + b.x, a.y + b.y}; }

Mat2C c2_conj(Mat2C a) { return {a.x, -a.y}; }

double c2_modulus_sq(Mat2C a) { return a.x * a.x + a.y * a.y; }

Mat2C c2_reciprocal(Mat2C a) {
  const double m = c2_modulus_sq(a);
  if (m == 0.0) throw DomainError("zero has no reciprocal");
  return {a.x / m, -a.y / m};
}

Mat2C c2_exp_rotation(double theta) { return {std::cos(theta), std::sin(theta)}; }

Mat2 taylor_expm(const Mat2& m, double cutoff, int max_terms) {
  Mat2 sum = Mat2::Identity();
  Mat2 term = Mat2::Identity();
  for (int k = 1; k < max_terms; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < cutoff) break;
  }
  return sum;
}

Mat2C entrywise_mul(Mat2C a, Mat2C b) { return {a.x * b.x, a.y * b.y}; }

namespace {

// Every element is sign * i^a * K^b with a, b in {0, 1}.
struct Word {
  int a;
  int b;
};

Word to_word(PqTag t) {
  switch (t) {
    case PqTag::one: return {0, 0};
    case PqTag::i: return {1, 0};
    case PqTag::K: return {0, 1};
    case PqTag::iK: return {1, 1};
  }
  return {0, 0};
}

PqTag from_word(int a, int b) {
  if (a == 0) return b == 0 ? PqTag::one : PqTag::K;
  return b == 0 ? PqTag::i : PqTag::iK;
}

}  // namespace

PseudoQuaternionElement pq_mul(PseudoQuaternionElement lhs, PseudoQuaternionElement rhs) {
  const Word l = to_word(lhs.tag);
  const Word r = to_word(rhs.tag);
  int sign = lhs.sign * rhs.sign;
  // K^b1 i^a2 = (-1)^(b1 a2) i^a2 K^b1
  if (l.b == 1 && r.a == 1) sign = -sign;
  int a = l.a + r.a;
  if (a == 2) {  // i^2 = -1
    sign = -sign;
    a = 0;
  }
  const int b = (l.b + r.b) % 2;  // K^2 = 1
  return {from_word(a, b), sign};
}

Mat2 pq_render(PseudoQuaternionElement e) {
  const Word w = to_word(e.tag);
  Mat2 m = Mat2::Identity();
  if (w.a) m = m * linear_complex_structure();
  if (w.b) m = m * conjugation_matrix();
  return static_cast<double>(e.sign) * m;
}

std::string_view pq_name(PqTag tag) {
  switch (tag) {
    case PqTag::one: return "1";
    case PqTag::i: return "i";
    case PqTag::K: return "K";
    case PqTag::iK: return "iK";
  }
  return "?";
}

}  // namespace stochq::complex_repr
