#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace levy_replenish {

/// Dense real polynomial, coefficients stored in ascending powers.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> ascending);
  Polynomial(std::initializer_list<double> ascending);

  static Polynomial constant(double c) { return Polynomial({c}); }
  static Polynomial monomial(int power, double coefficient = 1.0);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double coefficient(int power) const;
  double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;

  Polynomial derivative() const;
  /// p(a + s*y) as a polynomial in y.
  Polynomial compose_affine(double a, double s) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double c) { return a *= c; }
  friend Polynomial operator*(double c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  std::vector<double> coeffs_;
};

/// All complex roots, as eigenvalues of the companion matrix.
std::vector<std::complex<double>> polynomial_roots(const Polynomial& p);

}  // namespace levy_replenish
