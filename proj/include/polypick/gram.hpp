#pragma once

// Finite moment Gram matrices over enumerated index sets and the reproducing
// kernels of the monomial subspaces they span.

#include <Eigen/Dense>

#include "polypick/moments.hpp"

namespace polypick {

/// Hermitian matrix G(i,j) = C_{alpha_i - alpha_j} over a graded-lex ordered
/// index list, together with its Cholesky factorization.  Immutable.
class GramMatrix {
 public:
  GramMatrix(const MomentTable& table, std::vector<MultiIndex> indices)
      : indices_(std::move(indices)) {
    if (indices_.empty()) throw std::invalid_argument("GramMatrix: empty index list");
    for (const auto& alpha : indices_)
      if (alpha.dim() != table.dim() || !alpha.nonnegative())
        throw std::invalid_argument("GramMatrix: bad index " + alpha.to_string());
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
      throw std::invalid_argument("GramMatrix: duplicate index");
    const int m = static_cast<int>(indices_.size());
    matrix_.resize(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        matrix_(i, j) = table.at(indices_[static_cast<std::size_t>(i)] -
                                 indices_[static_cast<std::size_t>(j)]);
    llt_.compute(matrix_);
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error(
          "GramMatrix: Cholesky factorization failed; the moment table is "
          "inconsistent with a positive measure");
    const auto diag = llt_.matrixLLT().diagonal().real();
    condition_estimate_ = std::pow(diag.maxCoeff() / diag.minCoeff(), 2.0);
  }

  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  /// Rough condition number from the Cholesky diagonal.
  double condition_estimate() const { return condition_estimate_; }

  Eigen::VectorXcd monomials(const Point& z) const {
    if (static_cast<int>(z.size()) != indices_[0].dim())
      throw std::invalid_argument("GramMatrix: point has wrong dimension");
    Eigen::VectorXcd v(size());
    for (int i = 0; i < size(); ++i) {
      Complex t(1.0, 0.0);
      const MultiIndex& alpha = indices_[static_cast<std::size_t>(i)];
      for (int j = 0; j < alpha.dim(); ++j)
        for (int k = 0; k < alpha[j]; ++k) t *= z[static_cast<std::size_t>(j)];
      v(i) = t;
    }
    return v;
  }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const { return llt_.solve(rhs); }

  /// Reproducing kernel of the spanned subspace: v(z)^T conj(G^{-1} v(zeta)).
  Complex rk_evaluate(const Point& z, const Point& zeta) const {
    require_open_polydisk(z);
    require_open_polydisk(zeta);
    const Eigen::VectorXcd x = llt_.solve(monomials(zeta));
    return x.dot(monomials(z));
  }

  /// Exact eigenvalue extremes (full Hermitian decomposition).
  std::pair<double, double> eigenvalue_range() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
  }

  static void require_open_polydisk(const Point& z) {
    for (const Complex& zj : z)
      if (!(std::abs(zj) < 1.0))
        throw std::domain_error("kernel evaluation requires the open polydisk");
  }

 private:
  std::vector<MultiIndex> indices_;
  Eigen::MatrixXcd matrix_;
  Eigen::LLT<Eigen::MatrixXcd> llt_;
  double condition_estimate_ = 0.0;
};

inline GramMatrix build_gram(const MomentTable& table, std::vector<MultiIndex> indices) {
  return GramMatrix(table, std::move(indices));
}

/// max over gamma in the index list of |sum_alpha C_{gamma-alpha} x_alpha - zeta^gamma|
/// with x = G^{-1} v(zeta); measures the accuracy of the kernel solve.
inline double reproducing_property_residual(const GramMatrix& gram, const MomentTable& table,
                                            const Point& zeta) {
  const Eigen::VectorXcd x = gram.solve(gram.monomials(zeta));
  const Eigen::VectorXcd v = gram.monomials(zeta);
  double worst = 0.0;
  for (int i = 0; i < gram.size(); ++i) {
    Complex s(0.0, 0.0);
    for (int j = 0; j < gram.size(); ++j)
      s += table.at(gram.indices()[static_cast<std::size_t>(i)] -
                    gram.indices()[static_cast<std::size_t>(j)]) *
           x(j);
    worst = std::max(worst, std::abs(s - v(i)));
  }
  return worst;
}

}  // namespace polypick
