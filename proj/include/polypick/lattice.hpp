#pragma once

// Multi-indices and the lattice index sets that label monomial subspaces
// on the d-dimensional polydisk.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace polypick {

/// Integer multi-index alpha = (alpha_1, ..., alpha_d).
/// operator< is the graded lexicographic order (total degree first, then
/// lexicographic), which is the canonical enumeration order everywhere.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}
  MultiIndex(std::initializer_list<int> entries) : entries_(entries) {}

  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(check_dim(dim), 0)); }
  static MultiIndex constant(int dim, int value) {
    return MultiIndex(std::vector<int>(check_dim(dim), value));
  }

  int dim() const { return static_cast<int>(entries_.size()); }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  int& operator[](int i) { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const { return entries_; }

  int total_degree() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }

  bool nonnegative() const {
    return std::all_of(entries_.begin(), entries_.end(), [](int e) { return e >= 0; });
  }

  friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
    require_same_dim(a, b);
    MultiIndex r = a;
    for (int i = 0; i < a.dim(); ++i) r[i] += b[i];
    return r;
  }

  friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
    require_same_dim(a, b);
    MultiIndex r = a;
    for (int i = 0; i < a.dim(); ++i) r[i] -= b[i];
    return r;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.entries_ == b.entries_;
  }

  friend bool operator<(const MultiIndex& a, const MultiIndex& b) {
    require_same_dim(a, b);
    int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    return std::lexicographical_compare(a.entries_.begin(), a.entries_.end(),
                                        b.entries_.begin(), b.entries_.end());
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim(); ++i) os << (i ? "," : "") << entries_[static_cast<std::size_t>(i)];
    os << ')';
    return os.str();
  }

 private:
  static int check_dim(int dim) {
    if (dim < 1) throw std::invalid_argument("MultiIndex: dimension must be positive");
    return dim;
  }
  static void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
  }

  std::vector<int> entries_;
};

/// Componentwise partial order alpha <= beta.  Distinct from MultiIndex's
/// operator<, which is the (total) graded lexicographic order.
inline bool leq(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("leq: dimension mismatch");
  for (int i = 0; i < a.dim(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

/// Symbolic set of multi-indices with a membership predicate and box-bounded
/// enumeration.  Primitive sets:
///   orthant(d)            all alpha >= 0
///   shifted_orthant(n)    alpha >= n
///   b_set(n)              alpha >= 0 with alpha >= n false (the defect set B)
///   x_single(j, n)        alpha >= 0 with alpha_j < n_j            (X_j)
///   x_union(S, n)         union of x_single(j, n) over j in S;     (X_S)
///                         empty S means the singleton {0}
///   box(N)                0 <= alpha < N componentwise
///   singleton(alpha)
/// plus union / intersection / difference combinators.  Variables are
/// 1-based in x_single / x_union.
class IndexSet {
 public:
  static IndexSet orthant(int d) { return make(Orthant{}, check_dim(d)); }

  static IndexSet shifted_orthant(MultiIndex n) {
    require_nonneg(n, "shifted_orthant");
    int d = n.dim();
    return make(ShiftedOrthant{std::move(n)}, d);
  }

  static IndexSet b_set(MultiIndex n) {
    require_nonneg(n, "b_set");
    int d = n.dim();
    return make(BSet{std::move(n)}, d);
  }

  static IndexSet x_single(int j, MultiIndex n) {
    require_nonneg(n, "x_single");
    require_var(j, n.dim(), "x_single");
    int d = n.dim();
    return make(XSingle{j, std::move(n)}, d);
  }

  static IndexSet x_union(std::vector<int> vars, MultiIndex n) {
    require_nonneg(n, "x_union");
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end())
      throw std::invalid_argument("x_union: repeated variable");
    for (int j : vars) require_var(j, n.dim(), "x_union");
    int d = n.dim();
    return make(XUnion{std::move(vars), std::move(n)}, d);
  }

  static IndexSet box(MultiIndex extent) {
    for (int i = 0; i < extent.dim(); ++i)
      if (extent[i] <= 0) throw std::invalid_argument("box: nonpositive extent component");
    int d = extent.dim();
    return make(Box{std::move(extent)}, d);
  }

  static IndexSet singleton(MultiIndex alpha) {
    require_nonneg(alpha, "singleton");
    int d = alpha.dim();
    return make(Singleton{std::move(alpha)}, d);
  }

  friend IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    int d = require_match(a, b, "set_union");
    return make(Union{a.node_, b.node_}, d);
  }

  friend IndexSet set_intersect(const IndexSet& a, const IndexSet& b) {
    int d = require_match(a, b, "set_intersect");
    return make(Intersect{a.node_, b.node_}, d);
  }

  friend IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
    int d = require_match(a, b, "set_difference");
    return make(Diff{a.node_, b.node_}, d);
  }

  int dim() const { return node_->dim; }

  bool contains(const MultiIndex& alpha) const {
    if (alpha.dim() != dim()) throw std::invalid_argument("IndexSet::contains: dimension mismatch");
    return eval(*node_, alpha);
  }

  /// All members inside [0, bound) componentwise, in graded lex order.
  std::vector<MultiIndex> enumerate(const MultiIndex& bound) const {
    if (bound.dim() != dim()) throw std::invalid_argument("enumerate: dimension mismatch");
    for (int i = 0; i < bound.dim(); ++i)
      if (bound[i] <= 0) throw std::invalid_argument("enumerate: nonpositive box component");
    std::vector<MultiIndex> out;
    MultiIndex alpha = MultiIndex::zero(dim());
    for (;;) {
      if (eval(*node_, alpha)) out.push_back(alpha);
      int i = dim() - 1;
      while (i >= 0 && alpha[i] + 1 >= bound[i]) {
        alpha[i] = 0;
        --i;
      }
      if (i < 0) break;
      ++alpha[i];
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Orthant {};
  struct ShiftedOrthant { MultiIndex n; };
  struct BSet { MultiIndex n; };
  struct XSingle { int j; MultiIndex n; };
  struct XUnion { std::vector<int> vars; MultiIndex n; };
  struct Box { MultiIndex extent; };
  struct Singleton { MultiIndex alpha; };
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Union { NodePtr a, b; };
  struct Intersect { NodePtr a, b; };
  struct Diff { NodePtr a, b; };

  struct Node {
    std::variant<Orthant, ShiftedOrthant, BSet, XSingle, XUnion, Box, Singleton, Union, Intersect,
                 Diff>
        v;
    int dim;
  };

  template <class T>
  static IndexSet make(T&& node, int dim) {
    IndexSet s;
    s.node_ = std::make_shared<const Node>(Node{std::forward<T>(node), dim});
    return s;
  }

  static bool eval(const Node& node, const MultiIndex& alpha) {
    return std::visit(
        [&alpha](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Orthant>) {
            return alpha.nonnegative();
          } else if constexpr (std::is_same_v<T, ShiftedOrthant>) {
            return alpha.nonnegative() && leq(n.n, alpha);
          } else if constexpr (std::is_same_v<T, BSet>) {
            return alpha.nonnegative() && !leq(n.n, alpha);
          } else if constexpr (std::is_same_v<T, XSingle>) {
            return alpha.nonnegative() && alpha[n.j - 1] < n.n[n.j - 1];
          } else if constexpr (std::is_same_v<T, XUnion>) {
            if (!alpha.nonnegative()) return false;
            if (n.vars.empty()) return alpha == MultiIndex::zero(alpha.dim());
            return std::any_of(n.vars.begin(), n.vars.end(),
                               [&](int j) { return alpha[j - 1] < n.n[j - 1]; });
          } else if constexpr (std::is_same_v<T, Box>) {
            if (!alpha.nonnegative()) return false;
            for (int i = 0; i < alpha.dim(); ++i)
              if (alpha[i] >= n.extent[i]) return false;
            return true;
          } else if constexpr (std::is_same_v<T, Singleton>) {
            return alpha == n.alpha;
          } else if constexpr (std::is_same_v<T, Union>) {
            return eval(*n.a, alpha) || eval(*n.b, alpha);
          } else if constexpr (std::is_same_v<T, Intersect>) {
            return eval(*n.a, alpha) && eval(*n.b, alpha);
          } else {
            return eval(*n.a, alpha) && !eval(*n.b, alpha);
          }
        },
        node.v);
  }

  static int check_dim(int d) {
    if (d < 1) throw std::invalid_argument("IndexSet: dimension must be positive");
    return d;
  }
  static void require_nonneg(const MultiIndex& n, const char* where) {
    if (!n.nonnegative())
      throw std::invalid_argument(std::string(where) + ": negative component in multi-index");
  }
  static void require_var(int j, int d, const char* where) {
    if (j < 1 || j > d)
      throw std::invalid_argument(std::string(where) + ": variable index out of range");
  }
  static int require_match(const IndexSet& a, const IndexSet& b, const char* where) {
    if (a.dim() != b.dim())
      throw std::invalid_argument(std::string(where) + ": dimension mismatch");
    return a.dim();
  }

  std::shared_ptr<const Node> node_;
};

/// Complement of S inside {1, ..., d}; S entries are 1-based and distinct.
inline std::vector<int> complement_vars(const std::vector<int>& S, int d) {
  std::vector<bool> in(static_cast<std::size_t>(d) + 1, false);
  for (int j : S) {
    if (j < 1 || j > d) throw std::invalid_argument("complement_vars: variable index out of range");
    if (in[static_cast<std::size_t>(j)])
      throw std::invalid_argument("complement_vars: repeated variable");
    in[static_cast<std::size_t>(j)] = true;
  }
  std::vector<int> T;
  for (int j = 1; j <= d; ++j)
    if (!in[static_cast<std::size_t>(j)]) T.push_back(j);
  return T;
}

}  // namespace polypick
