#pragma once

// Truncated structured decompositions of the polydisk Pick kernel of a
// rational inner function f = reflect(p)/p.
//
// Fix a nonempty proper variable subset S of {1..d} with complement T and a
// truncation box [0,N)^d.  With X_U = union over j in U of {alpha_j < n_j}
// (and X_{} = {0}), the four truncated kernels are Gram block kernels of the
// weighted moment table:
//
//   K_S^N = rk(X_T ∩ box)
//   L_S^N = rk(X_T ∩ box) - rk(X_S ∩ X_T ∩ box)
//
// and the same with S and T exchanged.  K_S^N + L_T^N converges to the Pick
// kernel P as N grows, while K_S^N - L_S^N = K_T^N - L_T^N holds exactly at
// every N (both sides reproduce the intersection block).

#include <limits>

#include "polypick/kernels.hpp"
#include "polypick/points.hpp"

namespace polypick {

struct DecompositionSpec {
  Polynomial p;
  MultiIndex n;        // declared degree of p (componentwise at least the support)
  std::vector<int> S;  // strictly increasing 1-based variables, nonempty, proper
  int truncation;      // box edge N

  DecompositionSpec(Polynomial poly, MultiIndex degree, std::vector<int> vars, int N)
      : p(std::move(poly)), n(std::move(degree)), S(std::move(vars)), truncation(N) {
    const int d = p.dim();
    if (d < 2) throw std::invalid_argument("decomposition requires at least two variables");
    if (n.dim() != d) throw std::invalid_argument("decomposition: degree dimension mismatch");
    if (!leq(p.support_degree(), n))
      throw std::invalid_argument("decomposition: declared degree is below the support of p");
    if (S.empty() || static_cast<int>(S.size()) >= d)
      throw std::invalid_argument("decomposition: S must be a nonempty proper variable subset");
    for (std::size_t i = 0; i < S.size(); ++i)
      if (S[i] < 1 || S[i] > d || (i > 0 && S[i] <= S[i - 1]))
        throw std::invalid_argument("decomposition: S must be strictly increasing in [1,d]");
    if (truncation < 1) throw std::invalid_argument("decomposition: truncation must be positive");
  }

  std::vector<int> T() const { return complement_vars(S, p.dim()); }
};

namespace detail {

inline std::string kernel_label(const char* prefix, const std::vector<int>& vars, int N) {
  std::string s(prefix);
  s += '{';
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(vars[i]);
  }
  s += "}^" + std::to_string(N);
  return s;
}

inline void require_table_range(const DecompositionSpec& spec, const MomentTable& table) {
  if (!table.in_range(MultiIndex::constant(spec.p.dim(), spec.truncation - 1)))
    throw std::invalid_argument(
        "decomposition: moment table does not cover differences from the truncation box");
}

inline std::shared_ptr<const GramMatrix> block_gram(const MomentTable& table, const IndexSet& set,
                                                    const MultiIndex& box) {
  return std::make_shared<GramMatrix>(table, set.enumerate(box));
}

struct KernelQuad {
  KernelHandle KS, LS, KT, LT;
};

/// Builds all four kernels of the split, sharing the three Gram blocks.
inline KernelQuad build_quad(const DecompositionSpec& spec, const MomentTable& table) {
  require_table_range(spec, table);
  const int N = spec.truncation;
  const MultiIndex box = MultiIndex::constant(spec.p.dim(), N);
  const std::vector<int> T = spec.T();
  const IndexSet XT = IndexSet::x_union(T, spec.n);
  const IndexSet XS = IndexSet::x_union(spec.S, spec.n);
  auto GT = block_gram(table, XT, box);
  auto GS = block_gram(table, XS, box);
  auto GI = block_gram(table, set_intersect(XS, XT), box);
  KernelQuad q;
  q.KS = KernelHandle::gram_subspace(GT).renamed(kernel_label("K", spec.S, N));
  q.LS = KernelHandle::difference(KernelHandle::gram_subspace(GT), KernelHandle::gram_subspace(GI))
             .renamed(kernel_label("L", spec.S, N));
  q.KT = KernelHandle::gram_subspace(GS).renamed(kernel_label("K", T, N));
  q.LT = KernelHandle::difference(KernelHandle::gram_subspace(GS), KernelHandle::gram_subspace(GI))
             .renamed(kernel_label("L", T, N));
  return q;
}

struct PairResidual {
  double max = 0.0;
  double mean = 0.0;
  std::size_t worst_i = 0, worst_j = 0;
};

/// Maximum and mean of |f(z_i, z_j)| over all ordered point pairs.
template <class F>
PairResidual max_pair_residual(const PointSet& pts, F&& f) {
  PairResidual r;
  double sum = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const double v = std::abs(f(pts.points[i], pts.points[j]));
      sum += v;
      if (v > r.max) {
        r.max = v;
        r.worst_i = i;
        r.worst_j = j;
      }
    }
  r.mean = sum / static_cast<double>(pts.size() * pts.size());
  return r;
}

}  // namespace detail

/// K_S^N: reproducing kernel of the X_T ∩ [0,N)^d Gram block.
inline KernelHandle build_KS(const DecompositionSpec& spec, const MomentTable& table) {
  detail::require_table_range(spec, table);
  const MultiIndex box = MultiIndex::constant(spec.p.dim(), spec.truncation);
  auto GT = detail::block_gram(table, IndexSet::x_union(spec.T(), spec.n), box);
  return KernelHandle::gram_subspace(GT).renamed(
      detail::kernel_label("K", spec.S, spec.truncation));
}

/// L_S^N: the X_T block kernel minus the X_S ∩ X_T block kernel.
inline KernelHandle build_LS(const DecompositionSpec& spec, const MomentTable& table) {
  detail::require_table_range(spec, table);
  const MultiIndex box = MultiIndex::constant(spec.p.dim(), spec.truncation);
  const IndexSet XT = IndexSet::x_union(spec.T(), spec.n);
  const IndexSet XS = IndexSet::x_union(spec.S, spec.n);
  auto big = KernelHandle::gram_subspace(detail::block_gram(table, XT, box));
  auto small = KernelHandle::gram_subspace(detail::block_gram(table, set_intersect(XS, XT), box));
  return KernelHandle::difference(big, small)
      .renamed(detail::kernel_label("L", spec.S, spec.truncation));
}

struct DecompositionResult {
  DecompositionSpec spec;
  KernelHandle P;   // exact Pick kernel of (p, n)
  KernelHandle KS;  // K_S^N
  KernelHandle LS;  // L_S^N
  KernelHandle KT;  // K_T^N
  KernelHandle LT;  // L_T^N
  double max_residual = 0.0;   // max over point pairs of |P - K_S^N - L_T^N|
  double mean_residual = 0.0;  // mean of the same quantity
  Point worst_z, worst_zeta;   // pair attaining the maximum
};

/// Builds the truncated split kernels and measures P - K_S^N - L_T^N on the
/// point set.  The residual shrinks as the truncation grows; the split
/// kernels themselves stay positive semidefinite at every N.
inline DecompositionResult decompose(const DecompositionSpec& spec, const MomentTable& table,
                                     const PointSet& pts) {
  if (pts.dim() != spec.p.dim())
    throw std::invalid_argument("decompose: point set dimension mismatch");
  detail::KernelQuad q = detail::build_quad(spec, table);
  KernelHandle P = explicit_P(spec.p, spec.n);
  auto res = detail::max_pair_residual(pts, [&](const Point& z, const Point& zeta) {
    return P.eval(z, zeta) - q.KS.eval(z, zeta) - q.LT.eval(z, zeta);
  });
  return DecompositionResult{spec,     P,        q.KS,
                             q.LS,     q.KT,     q.LT,
                             res.max,  res.mean, pts.points[res.worst_i],
                             pts.points[res.worst_j]};
}

/// Max over point pairs of |(K_S^N - L_S^N) - (K_T^N - L_T^N)|.  Both sides
/// equal the intersection block kernel, so this vanishes to rounding error
/// at every truncation.
inline double exact_difference_identity(const DecompositionSpec& spec, const MomentTable& table,
                                        const PointSet& pts) {
  if (pts.dim() != spec.p.dim())
    throw std::invalid_argument("exact_difference_identity: point set dimension mismatch");
  detail::KernelQuad q = detail::build_quad(spec, table);
  return detail::max_pair_residual(pts, [&](const Point& z, const Point& zeta) {
           return (q.KS.eval(z, zeta) - q.LS.eval(z, zeta)) -
                  (q.KT.eval(z, zeta) - q.LT.eval(z, zeta));
         })
      .max;
}

/// K(z, zeta) / (p(z) conj(p(zeta))): moves a kernel identity for
/// p p* - reflect(p) reflect(p)* to the Schur form 1 - f f*.
inline KernelHandle schur_normalize(const KernelHandle& K, const Polynomial& p) {
  return KernelHandle::p_normalized(K, p);
}

struct AglerPair {
  KernelHandle gamma1, gamma2;
  double identity_residual = 0.0;  // max |1 - f f* - (1-z1 zeta1*) g1 - (1-z2 zeta2*) g2|
  int truncation = 0;
};

/// Two-variable Agler decomposition from the S = {1} split:
/// gamma2 carries the (1-z1 zeta1*) twist of K_S^N, gamma1 the
/// (1-z2 zeta2*) twist of L_T^N, both Schur-normalized.
inline AglerPair agler_pair(const Polynomial& p, const MultiIndex& n, int N,
                            const MomentTable& table, const PointSet& pts) {
  if (p.dim() != 2) throw std::invalid_argument("agler_pair: requires exactly two variables");
  if (pts.dim() != 2) throw std::invalid_argument("agler_pair: point set dimension mismatch");
  DecompositionSpec spec(p, n, {1}, N);
  detail::KernelQuad q = detail::build_quad(spec, table);
  AglerPair out;
  out.truncation = N;
  out.gamma2 = schur_normalize(KernelHandle::shift_factor(1, q.KS), p)
                   .renamed("Gamma2^" + std::to_string(N));
  out.gamma1 = schur_normalize(KernelHandle::shift_factor(2, q.LT), p)
                   .renamed("Gamma1^" + std::to_string(N));
  out.identity_residual =
      detail::max_pair_residual(pts, [&](const Point& z, const Point& zeta) {
        const Complex ff = inner_eval(p, n, z) * std::conj(inner_eval(p, n, zeta));
        const Complex x1 = z[0] * std::conj(zeta[0]);
        const Complex x2 = z[1] * std::conj(zeta[1]);
        return 1.0 - ff - (1.0 - x1) * out.gamma1.eval(z, zeta) -
               (1.0 - x2) * out.gamma2.eval(z, zeta);
      }).max;
  return out;
}

struct GkvwPair {
  KernelHandle K, Kprime;
  int j = 0, k = 0;
  double identity_residual = 0.0;
  int truncation = 0;
};

/// d-variable two-kernel decomposition from the S = {j} split:
///   1 - f f* = prod_{r != j} (1 - z_r zeta_r*) K + prod_{r != k} (1 - z_r zeta_r*) K'
/// with K the Schur-normalized (1-z_j zeta_j*)-twist of K_S^N and K' the
/// (1-z_k zeta_k*)-twist of L_T^N; k must lie in the complement of {j}.
inline GkvwPair gkvw_pair(const Polynomial& p, const MultiIndex& n, int j, int k, int N,
                          const MomentTable& table, const PointSet& pts) {
  const int d = p.dim();
  if (d < 2) throw std::invalid_argument("gkvw_pair: requires at least two variables");
  if (j < 1 || j > d || k < 1 || k > d)
    throw std::invalid_argument("gkvw_pair: variable index out of range");
  if (j == k) throw std::invalid_argument("gkvw_pair: j and k must be distinct variables");
  if (pts.dim() != d) throw std::invalid_argument("gkvw_pair: point set dimension mismatch");
  DecompositionSpec spec(p, n, {j}, N);
  detail::KernelQuad q = detail::build_quad(spec, table);
  GkvwPair out;
  out.j = j;
  out.k = k;
  out.truncation = N;
  out.K = schur_normalize(KernelHandle::shift_factor(j, q.KS), p)
              .renamed("K^" + std::to_string(N));
  out.Kprime = schur_normalize(KernelHandle::shift_factor(k, q.LT), p)
                   .renamed("K'^" + std::to_string(N));
  out.identity_residual =
      detail::max_pair_residual(pts, [&](const Point& z, const Point& zeta) {
        const Complex ff = inner_eval(p, n, z) * std::conj(inner_eval(p, n, zeta));
        Complex pj = 1.0, pk = 1.0;
        for (int r = 1; r <= d; ++r) {
          const Complex x = z[r - 1] * std::conj(zeta[r - 1]);
          if (r != j) pj *= 1.0 - x;
          if (r != k) pk *= 1.0 - x;
        }
        return 1.0 - ff - pj * out.K.eval(z, zeta) - pk * out.Kprime.eval(z, zeta);
      }).max;
  return out;
}

struct SweepRow {
  int truncation = 0;
  double max_residual = 0.0;
  // Smallest eigenvalue over j in S of the (1 - z_j zeta_j*)-twisted sample
  // matrices of K_S^N and L_S^N.  Contractivity is a limit property: the
  // value can be materially negative at small N and climbs toward zero as
  // the truncation grows.
  double min_shifted_eigenvalue = 0.0;
};

/// Runs decompose over a strictly increasing truncation ladder and records
/// the split residual plus the worst twisted-contractivity eigenvalue.
inline std::vector<SweepRow> truncation_sweep(const Polynomial& p, const MultiIndex& n,
                                              const std::vector<int>& S,
                                              const std::vector<int>& ladder,
                                              const MomentTable& table, const PointSet& pts) {
  if (ladder.empty()) throw std::invalid_argument("truncation_sweep: empty ladder");
  for (std::size_t i = 0; i < ladder.size(); ++i)
    if (ladder[i] < 1 || (i > 0 && ladder[i] <= ladder[i - 1]))
      throw std::invalid_argument("truncation_sweep: ladder must be positive and increasing");
  std::vector<SweepRow> rows;
  rows.reserve(ladder.size());
  for (int N : ladder) {
    DecompositionSpec spec(p, n, S, N);
    DecompositionResult result = decompose(spec, table, pts);
    double min_eig = std::numeric_limits<double>::infinity();
    for (int j : S)
      for (const KernelHandle* kern : {&result.KS, &result.LS}) {
        Eigen::MatrixXcd M = kernel_matrix(KernelHandle::shift_factor(j, *kern), pts.points);
        Eigen::VectorXd eigs = hermitian_eigenvalues(M);
        min_eig = std::min(min_eig, eigs(0));
      }
    rows.push_back(SweepRow{N, result.max_residual, min_eig});
  }
  return rows;
}

/// True when each successive residual is no larger than the previous one up
/// to the given relative slack.
inline bool sweep_residuals_nonincreasing(const std::vector<SweepRow>& rows,
                                          double slack = 0.10) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].max_residual > rows[i - 1].max_residual * (1.0 + slack) + 1e-15) return false;
  return true;
}

}  // namespace polypick
