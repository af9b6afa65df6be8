#pragma once

// Sampled positive-semidefiniteness certificates.  Every claim about a
// kernel is reduced to the spectrum of its sample matrix on a finite point
// set and recorded with the tolerance that judged it.  Exact-at-N claims
// (Gram positivity, subset orderings, the split difference identity) are
// held to tight tolerances; limiting claims (decomposition residual,
// twisted contractivity, pair identities) are certified at the top of a
// truncation ladder together with a decay-trend requirement.

#include <cmath>
#include <ctime>

#include "polypick/decomp.hpp"

namespace polypick {

struct CheckRecord {
  std::string id;
  std::string paper_anchor;  // stable claim slug used by downstream tooling
  std::string kernel;
  int n_points = 0;
  double min_eig = std::numeric_limits<double>::quiet_NaN();
  double max_eig = std::numeric_limits<double>::quiet_NaN();  // not serialized
  double max_residual = std::numeric_limits<double>::quiet_NaN();
  double tol = 0.0;
  bool pass = false;
};

/// Spectrum test: pass iff lambda_min >= -tol * max(1, lambda_max).
/// The relative form makes the verdict invariant under K -> cK, c > 0.
inline CheckRecord check_psd(const KernelHandle& K, const PointSet& pts, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("check_psd: tolerance must be positive");
  Eigen::VectorXd eigs = hermitian_eigenvalues(kernel_matrix(K, pts.points));
  CheckRecord rec;
  rec.id = "psd:" + K.name();
  rec.paper_anchor = "kernel-positivity";
  rec.kernel = K.name();
  rec.n_points = static_cast<int>(pts.size());
  rec.min_eig = eigs(0);
  rec.max_eig = eigs(eigs.size() - 1);
  rec.tol = tol;
  rec.pass = rec.min_eig >= -tol * std::max(1.0, rec.max_eig);
  return rec;
}

/// One PSD record per j in S for the (1 - z_j zeta_j*)-twisted kernel.
inline std::vector<CheckRecord> check_contractive(const KernelHandle& K,
                                                  const std::vector<int>& S, const PointSet& pts,
                                                  double tol) {
  if (S.empty()) throw std::invalid_argument("check_contractive: S must be nonempty");
  std::vector<CheckRecord> out;
  out.reserve(S.size());
  for (int j : S) {
    CheckRecord rec = check_psd(KernelHandle::shift_factor(j, K), pts, tol);
    rec.id = "contractive:z" + std::to_string(j) + ":" + K.name();
    rec.paper_anchor = "twisted-contractivity";
    rec.kernel = K.name();
    out.push_back(std::move(rec));
  }
  return out;
}

/// PSD record for K1 - K2 (the ordering K1 >= K2 on the sampled points).
inline CheckRecord check_ordering(const KernelHandle& K1, const KernelHandle& K2,
                                  const PointSet& pts, double tol) {
  CheckRecord rec = check_psd(KernelHandle::difference(K1, K2), pts, tol);
  rec.id = "ordering:" + K1.name() + ">=" + K2.name();
  rec.paper_anchor = "kernel-ordering";
  rec.kernel = K1.name() + " - " + K2.name();
  return rec;
}

struct SuiteConfig {
  std::vector<int> ladder{4, 8, 16};
  int grid = 0;  // moment grid M; 0 selects the oversampled default
  int point_count = kDefaultPointCount;
  double radius = kDefaultPointRadius;
  std::uint64_t seed = kDefaultPointSeed;
  double tol_psd = 1e-9;       // exact-at-N claims
  double tol_identity = 1e-9;  // split difference identity (absolute)
  double tol_limit = 1e-6;     // limiting eigenvalue floors at the top ladder N
  double tol_split = 1e-5;     // limiting identity residuals at the top ladder N
  double tol_moment = 1e-8;    // aliasing and orthogonality residuals
  double trend_factor = 10.0;  // required residual drop per ladder step
  double sandwich_slack = 1e-3;  // relative slack on grid-sampled |p| extrema
  int gkvw_j = 1;
  int gkvw_k = 2;
};

struct CertificateReport {
  Polynomial p;
  MultiIndex n;
  SuiteConfig config;
  int grid_used = 0;
  std::string point_mode;
  StabilityVerdict stability;
  std::vector<CheckRecord> checks;
  bool pass = false;
  std::string timestamp;
};

namespace detail {

inline std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string subset_label(const std::vector<int>& S) {
  std::string s = "{";
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(S[i]);
  }
  return s + "}";
}

/// All nonempty subsets of {1..d} ordered by size then lexicographically.
/// The full set comes last; proper subsets are everything before it.
inline std::vector<std::vector<int>> nonempty_subsets(int d) {
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    std::vector<int> s;
    for (int j = 0; j < d; ++j)
      if (mask & (1u << j)) s.push_back(j + 1);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

/// K_S^N for any nonempty S (including the full set, where X_T collapses to
/// the constant block {0}).
inline KernelHandle subset_K(const MomentTable& table, const MultiIndex& n,
                             const std::vector<int>& S, int N) {
  const int d = n.dim();
  const MultiIndex box = MultiIndex::constant(d, N);
  auto idx = IndexSet::x_union(complement_vars(S, d), n).enumerate(box);
  return KernelHandle::gram_subspace(table, std::move(idx)).renamed(kernel_label("K", S, N));
}

inline bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace detail

/// Runs the full certificate suite for a stable p: moment diagnostics, the
/// Gram eigenvalue sandwich, and for every nonempty proper S the residual
/// ladder, twisted contractivity, difference identity and subset orderings,
/// plus the two-kernel pair identities.  An unstable p yields a report whose
/// only record is the stability rejection.
inline MultiIndex suite_moment_range(const MultiIndex& n, const SuiteConfig& config) {
  if (config.ladder.empty()) throw std::invalid_argument("suite_moment_range: empty ladder");
  const int N_top = config.ladder.back();
  std::vector<int> entries(static_cast<std::size_t>(n.dim()));
  for (int j = 0; j < n.dim(); ++j)
    entries[static_cast<std::size_t>(j)] = std::max(N_top - 1, 2 * n[j]);
  return MultiIndex{std::move(entries)};
}

inline CertificateReport run_suite(const Polynomial& p, const MultiIndex& n,
                                   const SuiteConfig& config = {},
                                   const MomentTable* moments = nullptr) {
  const int d = p.dim();
  if (d < 2) throw std::invalid_argument("run_suite: requires at least two variables");
  if (n.dim() != d) throw std::invalid_argument("run_suite: degree dimension mismatch");
  if (config.ladder.empty()) throw std::invalid_argument("run_suite: empty truncation ladder");
  for (std::size_t i = 1; i < config.ladder.size(); ++i)
    if (config.ladder[i] <= config.ladder[i - 1])
      throw std::invalid_argument("run_suite: ladder must be strictly increasing");

  CertificateReport report{p,  n,    config, 0,     "",
                           {}, {},   false,  detail::utc_timestamp()};
  report.stability = check_stability(p);

  CheckRecord stab;
  stab.id = "stability";
  stab.paper_anchor = "stable-denominator";
  stab.kernel = "-";
  stab.max_residual = report.stability.margin;
  stab.tol = report.stability.margin_threshold;
  stab.pass = report.stability.stable;
  report.checks.push_back(stab);
  if (!report.stability.stable) {
    report.pass = false;
    return report;
  }

  const int N_top = config.ladder.back();
  const MultiIndex range = suite_moment_range(n, config);
  // A caller-supplied table (say, from the disk cache) must be the exact one
  // the suite would compute, so reports stay deterministic either way.
  if (moments != nullptr) {
    const int grid = config.grid != 0 ? config.grid : default_moment_grid(range);
    if (moments->poly_hash() != polynomial_hash(p) || moments->range() != range ||
        moments->grid() != grid)
      throw std::invalid_argument("run_suite: supplied moment table does not match the config");
  }
  MomentTable table =
      moments != nullptr ? *moments : compute_moments(p, range, config.grid, &report.stability);
  report.grid_used = table.grid();

  PointSet pts = PointSet::random(d, config.point_count, config.radius, config.seed);
  report.point_mode = pts.mode;

  {
    CheckRecord rec;
    rec.id = "moments:aliasing";
    rec.paper_anchor = "moment-grid-accuracy";
    rec.kernel = "moments[M=" + std::to_string(table.grid()) + "]";
    rec.max_residual = table.aliasing_error();
    rec.tol = config.tol_moment;
    rec.pass = table.aliasing_error() <= config.tol_moment;
    report.checks.push_back(std::move(rec));
  }

  {
    // all Gram eigenvalues lie between the reciprocal squared extrema of |p|
    // on the torus; extrema sampled on a dense grid, hence the slack
    const int sandbox = std::min(N_top, 8);
    auto idx = IndexSet::orthant(d).enumerate(MultiIndex::constant(d, sandbox));
    GramMatrix gram(table, idx);
    auto [emin, emax] = gram.eigenvalue_range();
    auto [plo, phi] = torus_abs_extrema(p, default_stability_grid(d) * (d <= 2 ? 2 : 1));
    const double lo_bound = 1.0 / (phi * phi);
    const double hi_bound = 1.0 / (plo * plo);
    CheckRecord rec;
    rec.id = "gram:eigenvalue-sandwich";
    rec.paper_anchor = "moment-operator-bounds";
    rec.kernel = "gram[" + std::to_string(idx.size()) + "]";
    rec.min_eig = emin;
    rec.max_eig = emax;
    rec.max_residual = std::max({lo_bound - emin, emax - hi_bound, 0.0});
    rec.tol = config.sandwich_slack * hi_bound;
    rec.pass = rec.max_residual <= rec.tol;
    report.checks.push_back(std::move(rec));
  }

  {
    CheckRecord rec;
    rec.id = "moments:reflected-orthogonality";
    rec.paper_anchor = "reflected-polynomial-orthogonality";
    rec.kernel = "-";
    std::vector<int> twice(d);
    for (int j = 0; j < d; ++j) twice[j] = std::max(2 * n[j], 1);
    MultiIndex alpha_box{std::move(twice)};
    MultiIndex beta_box = n + MultiIndex::constant(d, 1);
    rec.max_residual = ptilde_orthogonality_residual(p, n, table, alpha_box, beta_box);
    rec.tol = config.tol_moment;
    rec.pass = rec.max_residual <= config.tol_moment;
    report.checks.push_back(std::move(rec));
  }

  const auto subsets = detail::nonempty_subsets(d);
  std::vector<KernelHandle> top_K(subsets.size());
  const KernelHandle P = explicit_P(p, n);

  for (std::size_t si = 0; si < subsets.size(); ++si) {
    const auto& S = subsets[si];
    const std::string label = detail::subset_label(S);
    const bool proper = static_cast<int>(S.size()) < d;
    if (!proper) {
      top_K[si] = detail::subset_K(table, n, S, N_top);
      continue;
    }

    std::vector<double> residuals;
    double diff_worst = 0.0;
    detail::KernelQuad top{};
    for (int N : config.ladder) {
      DecompositionSpec spec(p, n, S, N);
      detail::KernelQuad quad = detail::build_quad(spec, table);
      auto res = detail::max_pair_residual(pts, [&](const Point& z, const Point& zeta) {
        return P.eval(z, zeta) - quad.KS.eval(z, zeta) - quad.LT.eval(z, zeta);
      });
      residuals.push_back(res.max);
      diff_worst = std::max(
          diff_worst, detail::max_pair_residual(pts, [&](const Point& z, const Point& zeta) {
                        return (quad.KS.eval(z, zeta) - quad.LS.eval(z, zeta)) -
                               (quad.KT.eval(z, zeta) - quad.LT.eval(z, zeta));
                      }).max);
      if (N == N_top) top = quad;
    }
    top_K[si] = top.KS;

    {
      // limiting claim: small at the top N and decaying along the ladder
      CheckRecord rec;
      rec.id = "split:" + label;
      rec.paper_anchor = "split-identity";
      rec.kernel = top.KS.name() + " + " + top.LT.name();
      rec.n_points = static_cast<int>(pts.size());
      rec.max_residual = residuals.back();
      rec.tol = config.tol_split;
      bool trend = true;
      for (std::size_t i = 1; i < residuals.size(); ++i)
        if (residuals[i] > 1e-12 && residuals[i] * config.trend_factor > residuals[i - 1])
          trend = false;
      rec.pass = residuals.back() <= config.tol_split && trend;
      report.checks.push_back(std::move(rec));
    }

    {
      CheckRecord rec;
      rec.id = "difference:" + label;
      rec.paper_anchor = "difference-rule";
      rec.kernel = top.KS.name() + " - " + top.LS.name();
      rec.n_points = static_cast<int>(pts.size());
      rec.max_residual = diff_worst;
      rec.tol = config.tol_identity;
      rec.pass = diff_worst <= config.tol_identity;
      report.checks.push_back(std::move(rec));
    }

    for (const KernelHandle* kern : {&top.KS, &top.LS})
      for (CheckRecord rec : check_contractive(*kern, S, pts, config.tol_limit))
        report.checks.push_back(std::move(rec));
  }

  for (std::size_t a = 0; a < subsets.size(); ++a)
    for (std::size_t b = 0; b < subsets.size(); ++b) {
      if (a == b || subsets[a].size() >= subsets[b].size()) continue;
      if (!detail::is_subset(subsets[a], subsets[b])) continue;
      report.checks.push_back(check_ordering(top_K[a], top_K[b], pts, config.tol_psd));
    }

  if (d == 2) {
    AglerPair pair = agler_pair(p, n, N_top, table, pts);
    CheckRecord rec;
    rec.id = "agler:identity";
    rec.paper_anchor = "two-variable-pair-identity";
    rec.kernel = pair.gamma1.name() + ", " + pair.gamma2.name();
    rec.n_points = static_cast<int>(pts.size());
    rec.max_residual = pair.identity_residual;
    rec.tol = config.tol_split;
    rec.pass = pair.identity_residual <= config.tol_split;
    report.checks.push_back(std::move(rec));
    for (const KernelHandle* g : {&pair.gamma1, &pair.gamma2}) {
      CheckRecord prec = check_psd(*g, pts, config.tol_limit);
      prec.paper_anchor = "pair-member-positivity";
      report.checks.push_back(std::move(prec));
    }
  }

  {
    GkvwPair pair = gkvw_pair(p, n, config.gkvw_j, config.gkvw_k, N_top, table, pts);
    CheckRecord rec;
    rec.id = "gkvw:identity:j" + std::to_string(pair.j) + "k" + std::to_string(pair.k);
    rec.paper_anchor = "two-kernel-pair-identity";
    rec.kernel = pair.K.name() + ", " + pair.Kprime.name();
    rec.n_points = static_cast<int>(pts.size());
    rec.max_residual = pair.identity_residual;
    rec.tol = config.tol_split;
    rec.pass = pair.identity_residual <= config.tol_split;
    report.checks.push_back(std::move(rec));
    for (const KernelHandle* g : {&pair.K, &pair.Kprime}) {
      CheckRecord prec = check_psd(*g, pts, config.tol_limit);
      prec.paper_anchor = "pair-member-positivity";
      report.checks.push_back(std::move(prec));
    }
  }

  report.pass = true;
  for (const auto& rec : report.checks) report.pass = report.pass && rec.pass;
  return report;
}

}  // namespace polypick
