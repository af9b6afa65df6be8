#pragma once

// Numerical stability certificate: p has no zeros on the closed polydisk.
// Combines the staged one-variable-at-a-time root test (variables before
// stage k frozen on a torus grid, later ones at 1) with a dense minimum
// modulus scan of |p| on the torus grid.

#include <Eigen/Dense>
#include <limits>

#include "polypick/polynomial.hpp"

namespace polypick {

namespace detail {

/// M-th roots of unity with exact conjugate symmetry: lut[M-k] == conj(lut[k]).
/// The self-conjugate entries (k = 0 and, for even M, k = M/2) are exactly real.
inline std::vector<Complex> unit_roots(int M) {
  std::vector<Complex> lut(static_cast<std::size_t>(M));
  const double two_pi = 6.283185307179586476925286766559;
  for (int k = 0; k <= M / 2; ++k) lut[static_cast<std::size_t>(k)] = std::polar(1.0, two_pi * k / M);
  lut[0] = Complex(1.0, 0.0);
  if (M % 2 == 0) lut[static_cast<std::size_t>(M / 2)] = Complex(-1.0, 0.0);
  for (int k = M / 2 + 1; k < M; ++k)
    lut[static_cast<std::size_t>(k)] = std::conj(lut[static_cast<std::size_t>(M - k)]);
  return lut;
}

/// Roots of sum q_a w^a after stripping negligible leading coefficients.
/// The caller is responsible for rejecting identically-zero slices.
inline std::vector<Complex> univariate_roots(const std::vector<Complex>& q) {
  double scale = 0.0;
  for (const Complex& c : q) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  int m = static_cast<int>(q.size()) - 1;
  while (m > 0 && std::abs(q[static_cast<std::size_t>(m)]) <= 1e-14 * scale) --m;
  if (m == 0) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 1; i < m; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < m; ++i) C(i, m - 1) = -q[static_cast<std::size_t>(i)] / q[static_cast<std::size_t>(m)];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<Complex> roots(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return roots;
}

}  // namespace detail

struct StabilityStage {
  int variable = 0;
  long slices = 0;
  double min_root_modulus = std::numeric_limits<double>::infinity();
  bool degenerate = false;  // some slice was identically zero
  bool pass = false;
};

struct StabilityVerdict {
  bool stable = false;
  double margin = 0.0;  // min |p| over the torus grid
  int grid = 0;
  double margin_threshold = 0.0;
  std::vector<StabilityStage> stages;
};

inline int default_stability_grid(int dim) { return dim <= 2 ? 256 : (dim == 3 ? 64 : 32); }

/// Min and max of |p| over the grid^d torus lattice, streamed slice by slice.
inline std::pair<double, double> torus_abs_extrema(const Polynomial& p, int grid) {
  if (grid < 16) throw std::invalid_argument("torus_abs_extrema: grid too coarse");
  const int d = p.dim();
  const auto lut = detail::unit_roots(grid);
  const MultiIndex sup = p.support_degree();
  const int m1 = sup[0];
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  long slices = 1;
  for (int i = 1; i < d; ++i) slices *= grid;
  std::vector<int> m(static_cast<std::size_t>(d), 0);  // m[0] unused per slice
  std::vector<Complex> q(static_cast<std::size_t>(m1) + 1);
  for (long s = 0; s < slices; ++s) {
    long rem = s;
    for (int i = d - 1; i >= 1; --i) {
      m[static_cast<std::size_t>(i)] = static_cast<int>(rem % grid);
      rem /= grid;
    }
    std::fill(q.begin(), q.end(), Complex(0.0, 0.0));
    for (const auto& [alpha, c] : p.coefficients()) {
      Complex w = c;
      for (int i = 1; i < d; ++i)
        w *= lut[static_cast<std::size_t>((alpha[i] * m[static_cast<std::size_t>(i)]) % grid)];
      q[static_cast<std::size_t>(alpha[0])] += w;
    }
    for (int k = 0; k < grid; ++k) {
      Complex v(0.0, 0.0);
      for (int a = 0; a <= m1; ++a)
        v += q[static_cast<std::size_t>(a)] * lut[static_cast<std::size_t>((a * k) % grid)];
      double av = std::abs(v);
      lo = std::min(lo, av);
      hi = std::max(hi, av);
    }
  }
  return {lo, hi};
}

/// Staged certificate. Stage k freezes variables 1..k-1 on the grid, sets
/// variables k+1..d to 1 and requires every root in variable k to have
/// modulus > 1 + margin_threshold.  An identically-zero slice fails the
/// stage.  On top of the stages, min |p| on the full grid must clear
/// margin_threshold relative to the coefficient l1 norm.
inline StabilityVerdict check_stability(const Polynomial& p, int grid = 0,
                                        double margin_threshold = 1e-6) {
  const int d = p.dim();
  if (grid == 0) grid = default_stability_grid(d);
  if (grid < 16) throw std::invalid_argument("check_stability: grid too coarse");
  if (!(margin_threshold > 0.0))
    throw std::invalid_argument("check_stability: margin threshold must be positive");

  StabilityVerdict verdict;
  verdict.grid = grid;
  verdict.margin_threshold = margin_threshold;

  double l1 = 0.0;
  for (const auto& [alpha, c] : p.coefficients()) l1 += std::abs(c);
  const auto lut = detail::unit_roots(grid);
  const MultiIndex sup = p.support_degree();

  bool stages_ok = l1 > 0.0;
  if (l1 == 0.0) {
    StabilityStage st;
    st.variable = 1;
    st.slices = 1;
    st.degenerate = true;
    verdict.stages.push_back(st);
  }

  for (int k = 1; stages_ok && k <= d; ++k) {
    StabilityStage st;
    st.variable = k;
    st.slices = 1;
    for (int i = 1; i < k; ++i) st.slices *= grid;
    st.pass = true;

    const int mk = sup[k - 1];
    std::vector<int> m(static_cast<std::size_t>(k), 0);
    std::vector<Complex> q(static_cast<std::size_t>(mk) + 1);
    for (long s = 0; s < st.slices; ++s) {
      long rem = s;
      for (int i = k - 1; i >= 1; --i) {
        m[static_cast<std::size_t>(i - 1)] = static_cast<int>(rem % grid);
        rem /= grid;
      }
      std::fill(q.begin(), q.end(), Complex(0.0, 0.0));
      for (const auto& [alpha, c] : p.coefficients()) {
        Complex w = c;
        for (int i = 1; i < k; ++i)
          w *= lut[static_cast<std::size_t>((alpha[i - 1] * m[static_cast<std::size_t>(i - 1)]) % grid)];
        q[static_cast<std::size_t>(alpha[k - 1])] += w;
      }
      double slice_scale = 0.0;
      for (const Complex& c : q) slice_scale = std::max(slice_scale, std::abs(c));
      if (slice_scale <= 1e-14 * l1) {
        st.degenerate = true;
        st.pass = false;
        break;
      }
      for (const Complex& r : detail::univariate_roots(q)) {
        double ar = std::abs(r);
        st.min_root_modulus = std::min(st.min_root_modulus, ar);
        if (!(ar > 1.0 + margin_threshold)) st.pass = false;
      }
    }
    stages_ok = st.pass;
    verdict.stages.push_back(st);
  }

  auto [lo, hi] = torus_abs_extrema(p, grid);
  (void)hi;
  verdict.margin = lo;
  verdict.stable = stages_ok && lo > margin_threshold * l1;
  return verdict;
}

}  // namespace polypick
