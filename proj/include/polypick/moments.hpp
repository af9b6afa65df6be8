#pragma once

// Trigonometric moments C_gamma = int z^gamma dmu of the weight
// dmu = |p|^{-2} dsigma on the d-torus, extracted on a power-of-two grid by
// an axis-by-axis partial DFT.  The twiddle table is conjugate-symmetric,
// which makes C_{-gamma} == conj(C_gamma) hold bitwise.

#include <bit>

#include "polypick/stability.hpp"

namespace polypick {

/// Dense table of moments over the centered box [-R, R]^d.
class MomentTable {
 public:
  MomentTable(MultiIndex range, int grid, std::uint64_t poly_hash, std::vector<Complex> values,
              double aliasing_error, double density_bound)
      : range_(std::move(range)),
        grid_(grid),
        poly_hash_(poly_hash),
        values_(std::move(values)),
        aliasing_error_(aliasing_error),
        density_bound_(density_bound) {
    std::size_t expect = 1;
    for (int i = 0; i < range_.dim(); ++i)
      expect *= static_cast<std::size_t>(2 * range_[i] + 1);
    if (values_.size() != expect) throw std::invalid_argument("MomentTable: value count mismatch");
  }

  int dim() const { return range_.dim(); }
  const MultiIndex& range() const { return range_; }
  int grid() const { return grid_; }
  std::uint64_t poly_hash() const { return poly_hash_; }
  double aliasing_error() const { return aliasing_error_; }
  /// Upper bound sup 1/|p|^2 for the density, from the stability margin.
  double density_bound() const { return density_bound_; }
  const std::vector<Complex>& values() const { return values_; }

  bool in_range(const MultiIndex& gamma) const {
    if (gamma.dim() != dim()) throw std::invalid_argument("MomentTable: dimension mismatch");
    for (int i = 0; i < dim(); ++i)
      if (gamma[i] < -range_[i] || gamma[i] > range_[i]) return false;
    return true;
  }

  const Complex& at(const MultiIndex& gamma) const {
    if (!in_range(gamma))
      throw std::out_of_range("MomentTable: moment " + gamma.to_string() + " outside range " +
                              range_.to_string());
    std::size_t off = 0;
    for (int i = 0; i < dim(); ++i)
      off = off * static_cast<std::size_t>(2 * range_[i] + 1) +
            static_cast<std::size_t>(gamma[i] + range_[i]);
    return values_[off];
  }

 private:
  MultiIndex range_;
  int grid_;
  std::uint64_t poly_hash_;
  std::vector<Complex> values_;  // row-major over gamma + range
  double aliasing_error_;
  double density_bound_;
};

/// <z^alpha, z^beta> in L^2(mu), i.e. C_{alpha-beta}.
inline Complex inner_product(const MomentTable& table, const MultiIndex& alpha,
                             const MultiIndex& beta) {
  return table.at(alpha - beta);
}

inline int default_moment_grid(const MultiIndex& range) {
  int max_r = 0;
  for (int i = 0; i < range.dim(); ++i) max_r = std::max(max_r, range[i]);
  return std::max(64, static_cast<int>(std::bit_ceil(static_cast<unsigned>(8 * std::max(1, max_r)))));
}

namespace detail {

/// Axis-by-axis partial DFT: input is the weight on the [0,M)^d grid, output
/// the sums over e^{+2 pi i gamma.m / M} for gamma in [-R, R]^d (unnormalized).
inline std::vector<Complex> partial_dft(std::vector<Complex> data, const MultiIndex& range,
                                        int M) {
  const int d = range.dim();
  const auto lut = unit_roots(M);
  std::size_t prefix = 1, suffix = 1;
  for (int i = 1; i < d; ++i) suffix *= static_cast<std::size_t>(M);
  for (int axis = 0; axis < d; ++axis) {
    const int G = 2 * range[axis] + 1;
    std::vector<Complex> out(prefix * static_cast<std::size_t>(G) * suffix);
    for (std::size_t pre = 0; pre < prefix; ++pre)
      for (int g = 0; g < G; ++g) {
        const long long gamma = g - range[axis];
        for (std::size_t s = 0; s < suffix; ++s) {
          Complex acc(0.0, 0.0);
          const std::size_t base = pre * static_cast<std::size_t>(M) * suffix + s;
          for (int m = 0; m < M; ++m) {
            const int idx = static_cast<int>(((gamma * m) % M + M) % M);
            acc += data[base + static_cast<std::size_t>(m) * suffix] *
                   lut[static_cast<std::size_t>(idx)];
          }
          out[(pre * static_cast<std::size_t>(G) + static_cast<std::size_t>(g)) * suffix + s] = acc;
        }
      }
    data = std::move(out);
    prefix *= static_cast<std::size_t>(G);
    if (axis + 1 < d) suffix /= static_cast<std::size_t>(M);
  }
  return data;
}

/// Weight 1/|p|^2 on the [0,M)^d grid, slice-streamed along the first axis.
inline std::vector<Complex> weight_grid(const Polynomial& p, int M) {
  const int d = p.dim();
  const auto lut = unit_roots(M);
  const MultiIndex sup = p.support_degree();
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    total *= static_cast<std::size_t>(M);
    if (total > (1u << 26)) throw std::invalid_argument("compute_moments: grid too large");
  }
  std::vector<Complex> w(total);
  const std::size_t stride0 = total / static_cast<std::size_t>(M);
  long slices = static_cast<long>(stride0);
  std::vector<int> m(static_cast<std::size_t>(d), 0);
  std::vector<Complex> q(static_cast<std::size_t>(sup[0]) + 1);
  for (long s = 0; s < slices; ++s) {
    long rem = s;
    for (int i = d - 1; i >= 1; --i) {
      m[static_cast<std::size_t>(i)] = static_cast<int>(rem % M);
      rem /= M;
    }
    std::fill(q.begin(), q.end(), Complex(0.0, 0.0));
    for (const auto& [alpha, c] : p.coefficients()) {
      Complex t = c;
      for (int i = 1; i < d; ++i)
        t *= lut[static_cast<std::size_t>((alpha[i] * m[static_cast<std::size_t>(i)]) % M)];
      q[static_cast<std::size_t>(alpha[0])] += t;
    }
    for (int k = 0; k < M; ++k) {
      Complex v(0.0, 0.0);
      for (std::size_t a = 0; a < q.size(); ++a)
        v += q[a] * lut[static_cast<std::size_t>((static_cast<int>(a) * k) % M)];
      const double a2 = std::norm(v);
      if (!(a2 > 0.0)) throw std::runtime_error("compute_moments: weight blows up on the grid");
      w[static_cast<std::size_t>(k) * stride0 + static_cast<std::size_t>(s)] =
          Complex(1.0 / a2, 0.0);
    }
  }
  return w;
}

/// Direct (per-frequency) moment sums on a [0,M)^d grid for a few probes.
inline std::vector<Complex> direct_moments(const Polynomial& p, const std::vector<MultiIndex>& probes,
                                           int M) {
  const int d = p.dim();
  const auto lut = unit_roots(M);
  const MultiIndex sup = p.support_degree();
  auto lidx = [M](long long g, int m) {
    return static_cast<std::size_t>(((g * m) % M + M) % M);
  };
  std::vector<Complex> acc(probes.size(), Complex(0.0, 0.0));
  long slices = 1;
  for (int i = 1; i < d; ++i) slices *= M;
  std::vector<int> m(static_cast<std::size_t>(d), 0);
  std::vector<Complex> q(static_cast<std::size_t>(sup[0]) + 1);
  std::vector<double> w(static_cast<std::size_t>(M));
  // the inner sums over the first axis only depend on gamma_1
  std::vector<long long> g1s;
  for (const auto& g : probes)
    if (std::find(g1s.begin(), g1s.end(), g[0]) == g1s.end()) g1s.push_back(g[0]);
  std::vector<Complex> inner(g1s.size());
  for (long s = 0; s < slices; ++s) {
    long rem = s;
    for (int i = d - 1; i >= 1; --i) {
      m[static_cast<std::size_t>(i)] = static_cast<int>(rem % M);
      rem /= M;
    }
    std::fill(q.begin(), q.end(), Complex(0.0, 0.0));
    for (const auto& [alpha, c] : p.coefficients()) {
      Complex t = c;
      for (int i = 1; i < d; ++i)
        t *= lut[lidx(alpha[i], m[static_cast<std::size_t>(i)])];
      q[static_cast<std::size_t>(alpha[0])] += t;
    }
    for (int k = 0; k < M; ++k) {
      Complex v(0.0, 0.0);
      for (std::size_t a = 0; a < q.size(); ++a) v += q[a] * lut[lidx(static_cast<int>(a), k)];
      w[static_cast<std::size_t>(k)] = 1.0 / std::norm(v);
    }
    for (std::size_t i = 0; i < g1s.size(); ++i) {
      Complex t(0.0, 0.0);
      for (int k = 0; k < M; ++k) t += w[static_cast<std::size_t>(k)] * lut[lidx(g1s[i], k)];
      inner[i] = t;
    }
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      const MultiIndex& g = probes[pi];
      Complex phase(1.0, 0.0);
      for (int i = 1; i < d; ++i) phase *= lut[lidx(g[i], m[static_cast<std::size_t>(i)])];
      const std::size_t which =
          static_cast<std::size_t>(std::find(g1s.begin(), g1s.end(), g[0]) - g1s.begin());
      acc[pi] += inner[which] * phase;
    }
  }
  double scale = 1.0;
  for (int i = 0; i < d; ++i) scale /= M;
  for (auto& a : acc) a *= scale;
  return acc;
}

inline std::vector<MultiIndex> aliasing_probes(const MultiIndex& range) {
  const int d = range.dim();
  std::vector<MultiIndex> probes{MultiIndex::zero(d)};
  auto push = [&probes](const MultiIndex& g) {
    if (std::find(probes.begin(), probes.end(), g) == probes.end()) probes.push_back(g);
  };
  for (int j = 0; j < d; ++j) {
    MultiIndex e = MultiIndex::zero(d);
    e[j] = range[j];
    push(e);
  }
  push(range);
  MultiIndex alt = range;
  for (int j = 1; j < d; j += 2) alt[j] = -alt[j];
  push(alt);
  return probes;
}

}  // namespace detail

/// Moments on the torus grid.  The polynomial must be certifiably stable;
/// pass a precomputed verdict to skip the gate.  grid == 0 picks the default
/// power of two (at least 8x oversampling of the largest requested degree).
/// The aliasing error estimate compares a probe subset against the doubled
/// grid.
inline MomentTable compute_moments(const Polynomial& p, const MultiIndex& range, int grid = 0,
                                   const StabilityVerdict* verdict = nullptr) {
  const int d = p.dim();
  if (range.dim() != d || !range.nonnegative())
    throw std::invalid_argument("compute_moments: bad range");
  if (grid == 0) grid = default_moment_grid(range);
  if (grid < 4 || (grid & (grid - 1)) != 0)
    throw std::invalid_argument("compute_moments: grid must be a power of two");
  for (int i = 0; i < d; ++i)
    if (grid < 2 * range[i] + 2)
      throw std::invalid_argument("compute_moments: grid too small for requested range");

  StabilityVerdict own;
  if (verdict == nullptr) {
    own = check_stability(p);
    verdict = &own;
  }
  if (!verdict->stable)
    throw std::domain_error("compute_moments: polynomial is not certifiably stable");

  std::vector<Complex> values = detail::partial_dft(detail::weight_grid(p, grid), range, grid);
  double scale = 1.0;
  for (int i = 0; i < d; ++i) scale /= grid;
  for (auto& v : values) v *= scale;

  const auto probes = detail::aliasing_probes(range);
  const auto doubled = detail::direct_moments(p, probes, 2 * grid);
  auto value_at = [&values, &range, d](const MultiIndex& g) {
    std::size_t off = 0;
    for (int i = 0; i < d; ++i)
      off = off * static_cast<std::size_t>(2 * range[i] + 1) +
            static_cast<std::size_t>(g[i] + range[i]);
    return values[off];
  };
  double alias = 0.0;
  for (std::size_t i = 0; i < probes.size(); ++i)
    alias = std::max(alias, std::abs(value_at(probes[i]) - doubled[i]));
  return MomentTable(range, grid, polynomial_hash(p), std::move(values), alias,
                     1.0 / (verdict->margin * verdict->margin));
}

/// Moment of a stable univariate q from the Taylor series of 1/q; the
/// series is truncated once the geometric tail (from the smallest root
/// modulus) is negligible.
inline Complex univariate_moment(const std::vector<Complex>& q, int k) {
  if (q.empty() || q[0] == Complex(0.0, 0.0))
    throw std::invalid_argument("univariate_moment: factor must have nonzero constant term");
  const auto roots = detail::univariate_roots(q);
  double rho = std::numeric_limits<double>::infinity();
  for (const Complex& r : roots) rho = std::min(rho, std::abs(r));
  if (!(rho > 1.0))
    throw std::invalid_argument("univariate_moment: factor has a root inside the closed unit disk");
  const int ka = std::abs(k);
  if (roots.empty()) return k == 0 ? Complex(1.0 / std::norm(q[0]), 0.0) : Complex(0.0, 0.0);
  const int tail = static_cast<int>(std::ceil(23.0 * 2.302585092994046 / std::log(rho))) + 64;
  const int len = tail + ka + 1;
  std::vector<Complex> b(static_cast<std::size_t>(len));
  b[0] = 1.0 / q[0];
  const int m = static_cast<int>(q.size()) - 1;
  for (int l = 1; l < len; ++l) {
    Complex s(0.0, 0.0);
    for (int i = 1; i <= std::min(l, m); ++i)
      s += q[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(l - i)];
    b[static_cast<std::size_t>(l)] = -s / q[0];
  }
  Complex c(0.0, 0.0);
  for (int l = 0; l + ka < len; ++l)
    c += b[static_cast<std::size_t>(l)] * std::conj(b[static_cast<std::size_t>(l + ka)]);
  return k >= 0 ? c : std::conj(c);
}

/// Exact (series) moments for p(z) = prod_j q_j(z_j).
inline Complex separable_oracle(const std::vector<std::vector<Complex>>& factors,
                                const MultiIndex& gamma) {
  if (static_cast<int>(factors.size()) != gamma.dim())
    throw std::invalid_argument("separable_oracle: dimension mismatch");
  Complex c(1.0, 0.0);
  for (int j = 0; j < gamma.dim(); ++j)
    c *= univariate_moment(factors[static_cast<std::size_t>(j)], gamma[j]);
  return c;
}

/// Max over alpha in B(n) inside [0, alpha_box) and beta in [0, beta_box) of
/// |<z^alpha, z^beta p~>|, which vanishes for the true measure.
inline double ptilde_orthogonality_residual(const Polynomial& p, const MultiIndex& n,
                                            const MomentTable& table, const MultiIndex& alpha_box,
                                            const MultiIndex& beta_box) {
  const Polynomial pt = reflect(p, n);
  const auto alphas = IndexSet::b_set(n).enumerate(alpha_box);
  const auto betas = IndexSet::orthant(n.dim()).enumerate(beta_box);
  double worst = 0.0;
  for (const auto& alpha : alphas)
    for (const auto& beta : betas) {
      Complex s(0.0, 0.0);
      for (const auto& [g, c] : pt.coefficients()) s += std::conj(c) * table.at(alpha - beta - g);
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

inline double ptilde_orthogonality_residual(const Polynomial& p, const MultiIndex& n,
                                            const MomentTable& table, const MultiIndex& box) {
  return ptilde_orthogonality_residual(p, n, table, box, box);
}

}  // namespace polypick
