#pragma once

// Generators for families of stable polynomials used by tests and the
// certificate suite: affine, separable products of univariate factors, and
// determinantal polynomials det(I - A diag(z)) for strict contractions A.

#include <Eigen/Dense>
#include <random>

#include "polypick/stability.hpp"

namespace polypick::corpus {

/// p = c - sum_j a_j z_j, stable iff sum |a_j| < c.  Degree box (1,...,1).
inline Polynomial affine(double c, const std::vector<Complex>& a) {
  const int d = static_cast<int>(a.size());
  if (d < 1) throw std::invalid_argument("affine: need at least one variable");
  double s = 0.0;
  for (const Complex& aj : a) s += std::abs(aj);
  if (!(s < c)) throw std::invalid_argument("affine: requires sum |a_j| < c");
  Polynomial::CoeffMap coeffs;
  coeffs.emplace(MultiIndex::zero(d), Complex(c, 0.0));
  for (int j = 0; j < d; ++j) {
    if (a[static_cast<std::size_t>(j)] == Complex(0.0, 0.0)) continue;
    MultiIndex e = MultiIndex::zero(d);
    e[j] = 1;
    coeffs.emplace(e, -a[static_cast<std::size_t>(j)]);
  }
  return Polynomial(d, MultiIndex::constant(d, 1), std::move(coeffs));
}

/// p(z) = prod_j q_j(z_j) from per-variable coefficient lists (ascending
/// powers).  Every factor must have its roots outside the closed unit disk.
inline Polynomial separable(const std::vector<std::vector<Complex>>& factors) {
  const int d = static_cast<int>(factors.size());
  if (d < 1) throw std::invalid_argument("separable: need at least one factor");
  MultiIndex degree = MultiIndex::zero(d);
  for (int j = 0; j < d; ++j) {
    const auto& q = factors[static_cast<std::size_t>(j)];
    if (q.empty() || q[0] == Complex(0.0, 0.0))
      throw std::invalid_argument("separable: factor must have nonzero constant term");
    for (const Complex& r : detail::univariate_roots(q))
      if (!(std::abs(r) > 1.0))
        throw std::invalid_argument("separable: factor has a root inside the closed unit disk");
    degree[j] = static_cast<int>(q.size()) - 1;
  }
  Polynomial::CoeffMap coeffs;
  MultiIndex alpha = MultiIndex::zero(d);
  for (;;) {
    Complex c(1.0, 0.0);
    for (int j = 0; j < d; ++j) c *= factors[static_cast<std::size_t>(j)][static_cast<std::size_t>(alpha[j])];
    if (c != Complex(0.0, 0.0)) coeffs.emplace(alpha, c);
    int j = d - 1;
    while (j >= 0 && alpha[j] == degree[j]) alpha[j--] = 0;
    if (j < 0) break;
    ++alpha[j];
  }
  return Polynomial(d, degree, std::move(coeffs));
}

struct UnivariateSample {
  Polynomial poly;           // q(z) = prod_k (1 - z / roots[k]), so q(0) = 1
  std::vector<Complex> roots;
};

/// Random stable univariate polynomial with roots of modulus in
/// [min_root_modulus, max_root_modulus].
inline UnivariateSample random_univariate(std::uint64_t seed, int max_degree = 5,
                                          double min_root_modulus = 1.1,
                                          double max_root_modulus = 2.5) {
  if (max_degree < 1 || !(min_root_modulus > 1.0) || !(max_root_modulus >= min_root_modulus))
    throw std::invalid_argument("random_univariate: bad parameters");
  std::mt19937_64 eng(seed);
  auto u01 = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  const int deg = 1 + static_cast<int>(eng() % static_cast<std::uint64_t>(max_degree));
  std::vector<Complex> roots(static_cast<std::size_t>(deg));
  std::vector<Complex> q{Complex(1.0, 0.0)};
  for (auto& r : roots) {
    double rho = min_root_modulus + (max_root_modulus - min_root_modulus) * u01();
    r = std::polar(rho, 6.283185307179586 * u01());
    q.push_back(Complex(0.0, 0.0));
    for (std::size_t i = q.size() - 1; i > 0; --i) q[i] -= q[i - 1] / r;
  }
  Polynomial::CoeffMap coeffs;
  for (int a = 0; a <= deg; ++a) coeffs.emplace(MultiIndex{a}, q[static_cast<std::size_t>(a)]);
  return {Polynomial(1, MultiIndex{deg}, std::move(coeffs)), std::move(roots)};
}

/// p(z) = det(I - A diag(z)) for a strict contraction A (spectral norm < 1).
/// Coefficients are signed principal minors; degree box (1,...,1).  The zero
/// matrix gives p = 1.
inline Polynomial determinantal(const Eigen::MatrixXcd& A) {
  const int d = static_cast<int>(A.rows());
  if (d < 1 || A.cols() != A.rows())
    throw std::invalid_argument("determinantal: matrix must be square and nonempty");
  if (d > 20) throw std::invalid_argument("determinantal: dimension too large");
  double norm = A.jacobiSvd().singularValues()(0);
  if (!(norm < 1.0))
    throw std::invalid_argument("determinantal: matrix must be a strict contraction");
  Polynomial::CoeffMap coeffs;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    std::vector<int> vars;
    for (int j = 0; j < d; ++j)
      if (mask & (1u << j)) vars.push_back(j);
    const int k = static_cast<int>(vars.size());
    Complex minor(1.0, 0.0);
    if (k > 0) {
      Eigen::MatrixXcd sub(k, k);
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) sub(r, c) = A(vars[static_cast<std::size_t>(r)], vars[static_cast<std::size_t>(c)]);
      minor = sub.determinant();
    }
    Complex coeff = ((k % 2) ? -minor : minor);
    if (coeff == Complex(0.0, 0.0)) continue;
    MultiIndex alpha = MultiIndex::zero(d);
    for (int j : vars) alpha[j] = 1;
    coeffs.emplace(alpha, coeff);
  }
  return Polynomial(d, MultiIndex::constant(d, 1), std::move(coeffs));
}

/// Seeded complex Ginibre matrix rescaled to the requested spectral norm.
inline Polynomial random_determinantal(int d, std::uint64_t seed, double spectral_norm = 0.6) {
  if (d < 1 || !(spectral_norm > 0.0) || !(spectral_norm < 1.0))
    throw std::invalid_argument("random_determinantal: bad parameters");
  std::mt19937_64 eng(seed);
  auto u01 = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  auto gauss = [&u01] {
    double u = std::max(u01(), 1e-300), v = u01();
    return std::sqrt(-2.0 * std::log(u)) * Complex(std::cos(6.283185307179586 * v),
                                                   std::sin(6.283185307179586 * v));
  };
  Eigen::MatrixXcd A(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) A(r, c) = gauss();
  double norm = A.jacobiSvd().singularValues()(0);
  if (norm == 0.0) return determinantal(Eigen::MatrixXcd::Zero(d, d));
  return determinantal(A * (spectral_norm / norm));
}

/// Small deterministic corpus covering the three generator families.
inline std::vector<Polynomial> standard_corpus(int d) {
  if (d < 2 || d > 3) throw std::invalid_argument("standard_corpus: d must be 2 or 3");
  std::vector<Polynomial> out;
  if (d == 2) {
    out.push_back(affine(4.0, {Complex(1.0, 0.0), Complex(1.0, 0.0)}));
    out.push_back(separable({{Complex(1.0, 0.0), Complex(-0.5, 0.0)},
                             {Complex(1.0, 0.0), Complex(-1.0 / 3.0, 0.0)}}));
    out.push_back(random_determinantal(2, 11, 0.55));
  } else {
    out.push_back(affine(8.0, {Complex(1.0, 0.0), Complex(1.0, 0.0), Complex(1.0, 0.0)}));
    out.push_back(separable({{Complex(1.0, 0.0), Complex(-0.5, 0.0)},
                             {Complex(1.0, 0.0), Complex(-1.0 / 3.0, 0.0)},
                             {Complex(1.0, 0.0), Complex(0.25, 0.0)}}));
    out.push_back(random_determinantal(3, 13, 0.5));
  }
  return out;
}

}  // namespace polypick::corpus
