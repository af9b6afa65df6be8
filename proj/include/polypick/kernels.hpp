#pragma once

// Lazy Hermitian kernel expressions on the open polydisk: closed forms
// (Szego product, the defect kernel of a stable polynomial), Gram-subspace
// reproducing kernels, and the sum / difference / shift / normalization
// combinators, plus sampled kernel matrices.

#include <memory>

#include "polypick/gram.hpp"

namespace polypick {

class KernelHandle {
 public:
  static KernelHandle constant(int dim, Complex value) {
    return make(Constant{value}, check_dim(dim), "const");
  }

  /// Product Szego kernel prod_j 1/(1 - z_j conj(zeta_j)).
  static KernelHandle szego(int dim) { return make(Szego{}, check_dim(dim), "szego"); }

  /// Closed form (p(z)conj(p(zeta)) - p~(z)conj(p~(zeta))) * Szego; the
  /// reproducing kernel of the defect subspace when p is stable.
  static KernelHandle explicit_pick(const Polynomial& p, const MultiIndex& n) {
    return make(ExplicitPick{p, reflect(p, n)}, p.dim(), "P[" + hash_hex(polynomial_hash(p)).substr(0, 6) + "]");
  }

  static KernelHandle gram_subspace(std::shared_ptr<const GramMatrix> gram) {
    if (!gram) throw std::invalid_argument("gram_subspace: null gram");
    const int d = gram->indices()[0].dim();
    const std::string name = "rk(" + std::to_string(gram->size()) + ")";
    return make(Gram{std::move(gram)}, d, name);
  }

  /// Reproducing kernel over the given indices; an empty list spans the zero
  /// subspace, whose kernel is identically zero.
  static KernelHandle gram_subspace(const MomentTable& table, std::vector<MultiIndex> indices) {
    if (indices.empty()) return make(Constant{Complex(0.0, 0.0)}, table.dim(), "rk(0)");
    return gram_subspace(std::make_shared<const GramMatrix>(table, std::move(indices)));
  }

  static KernelHandle sum(const KernelHandle& a, const KernelHandle& b) {
    require_match(a, b, "sum");
    return make(Sum{a.node_, b.node_}, a.dim(), "(" + a.name() + " + " + b.name() + ")");
  }

  static KernelHandle difference(const KernelHandle& a, const KernelHandle& b) {
    require_match(a, b, "difference");
    return make(Diff{a.node_, b.node_}, a.dim(), "(" + a.name() + " - " + b.name() + ")");
  }

  /// (1 - z_var conj(zeta_var)) * K, var 1-based.
  static KernelHandle shift_factor(int var, const KernelHandle& k) {
    if (var < 1 || var > k.dim())
      throw std::invalid_argument("shift_factor: variable index out of range");
    return make(Shift{var, k.node_}, k.dim(),
                "shift" + std::to_string(var) + "(" + k.name() + ")");
  }

  /// K(z, zeta) / (p(z) conj(p(zeta))).
  static KernelHandle p_normalized(const KernelHandle& k, const Polynomial& p) {
    if (p.dim() != k.dim()) throw std::invalid_argument("p_normalized: dimension mismatch");
    return make(Normalized{k.node_, p}, k.dim(), "norm(" + k.name() + ")");
  }

  int dim() const { return node_->dim; }
  const std::string& name() const { return node_->name; }

  /// Same kernel under a new display name (cheap: shares all children).
  KernelHandle renamed(std::string name) const {
    KernelHandle k;
    k.node_ = std::make_shared<const Node>(Node{node_->v, node_->dim, std::move(name)});
    return k;
  }

  Complex eval(const Point& z, const Point& zeta) const {
    if (static_cast<int>(z.size()) != dim() || static_cast<int>(zeta.size()) != dim())
      throw std::invalid_argument("KernelHandle: point has wrong dimension");
    GramMatrix::require_open_polydisk(z);
    GramMatrix::require_open_polydisk(zeta);
    return eval_node(*node_, z, zeta);
  }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Constant { Complex value; };
  struct Szego {};
  struct ExplicitPick { Polynomial p, pt; };
  struct Gram { std::shared_ptr<const GramMatrix> gram; };
  struct Sum { NodePtr a, b; };
  struct Diff { NodePtr a, b; };
  struct Shift { int var; NodePtr k; };
  struct Normalized { NodePtr k; Polynomial p; };

  struct Node {
    std::variant<Constant, Szego, ExplicitPick, Gram, Sum, Diff, Shift, Normalized> v;
    int dim;
    std::string name;
  };

  template <class T>
  static KernelHandle make(T&& node, int dim, std::string name) {
    KernelHandle k;
    k.node_ = std::make_shared<const Node>(Node{std::forward<T>(node), dim, std::move(name)});
    return k;
  }

  static int check_dim(int d) {
    if (d < 1) throw std::invalid_argument("KernelHandle: dimension must be positive");
    return d;
  }
  static void require_match(const KernelHandle& a, const KernelHandle& b, const char* where) {
    if (a.dim() != b.dim())
      throw std::invalid_argument(std::string(where) + ": dimension mismatch");
  }

  static Complex eval_node(const Node& node, const Point& z, const Point& zeta) {
    return std::visit(
        [&](const auto& n) -> Complex {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Constant>) {
            return n.value;
          } else if constexpr (std::is_same_v<T, Szego>) {
            Complex s(1.0, 0.0);
            for (std::size_t j = 0; j < z.size(); ++j)
              s /= Complex(1.0, 0.0) - z[j] * std::conj(zeta[j]);
            return s;
          } else if constexpr (std::is_same_v<T, ExplicitPick>) {
            Complex s = n.p(z) * std::conj(n.p(zeta)) - n.pt(z) * std::conj(n.pt(zeta));
            for (std::size_t j = 0; j < z.size(); ++j)
              s /= Complex(1.0, 0.0) - z[j] * std::conj(zeta[j]);
            return s;
          } else if constexpr (std::is_same_v<T, Gram>) {
            return n.gram->rk_evaluate(z, zeta);
          } else if constexpr (std::is_same_v<T, Sum>) {
            return eval_node(*n.a, z, zeta) + eval_node(*n.b, z, zeta);
          } else if constexpr (std::is_same_v<T, Diff>) {
            return eval_node(*n.a, z, zeta) - eval_node(*n.b, z, zeta);
          } else if constexpr (std::is_same_v<T, Shift>) {
            const std::size_t j = static_cast<std::size_t>(n.var - 1);
            return (Complex(1.0, 0.0) - z[j] * std::conj(zeta[j])) * eval_node(*n.k, z, zeta);
          } else {
            return eval_node(*n.k, z, zeta) / (n.p(z) * std::conj(n.p(zeta)));
          }
        },
        node.v);
  }

  NodePtr node_;
};

inline KernelHandle explicit_P(const Polynomial& p, const MultiIndex& n) {
  return KernelHandle::explicit_pick(p, n);
}

/// M_{ij} = K(z_i, z_j) over a point list.
inline Eigen::MatrixXcd kernel_matrix(const KernelHandle& K, const std::vector<Point>& pts) {
  const int m = static_cast<int>(pts.size());
  if (m == 0) throw std::invalid_argument("kernel_matrix: empty point set");
  Eigen::MatrixXcd M(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      try {
        M(i, j) = K.eval(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      } catch (const std::exception& e) {
        throw std::runtime_error("kernel_matrix: evaluation failed at points (" +
                                 std::to_string(i) + "," + std::to_string(j) + "): " + e.what());
      }
    }
  return M;
}

/// max_ij |M(i,j) - conj(M(j,i))|.
inline double hermitian_defect(const Eigen::MatrixXcd& M) {
  return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

/// Ascending eigenvalues of the Hermitian part (M + M^adj)/2.
inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& M) {
  Eigen::MatrixXcd H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace polypick
