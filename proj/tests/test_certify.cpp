#include <catch2/catch_amalgamated.hpp>

#include "polypick/certify.hpp"
#include "polypick/corpus.hpp"

using namespace polypick;
using Catch::Matchers::WithinAbs;

namespace {

Polynomial one2() { return Polynomial::constant(2, 1.0, MultiIndex{1, 1}); }

bool same_value(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

bool same_record(const CheckRecord& a, const CheckRecord& b) {
  return a.id == b.id && a.paper_anchor == b.paper_anchor && a.kernel == b.kernel &&
         a.n_points == b.n_points && same_value(a.min_eig, b.min_eig) &&
         same_value(a.max_eig, b.max_eig) && same_value(a.max_residual, b.max_residual) &&
         a.tol == b.tol && a.pass == b.pass;
}

}  // namespace

TEST_CASE("psd check is scale invariant and catches sign flips") {
  auto pts = PointSet::random(2, 5, 0.6, 3);

  auto ones = check_psd(KernelHandle::constant(2, 1.0), pts, 1e-9);
  CHECK(ones.pass);
  CHECK_THAT(ones.min_eig, WithinAbs(0.0, 1e-12));
  CHECK_THAT(ones.max_eig, WithinAbs(5.0, 1e-12));

  auto negated = check_psd(KernelHandle::constant(2, -1.0), pts, 1e-9);
  CHECK_FALSE(negated.pass);

  // P scales by c^2 when p scales by c, so the relative rule gives the same
  // verdict and a min eigenvalue exactly four times larger
  auto aff = corpus::affine(4.0, {1.0, 1.0});
  Polynomial doubled(2, MultiIndex{1, 1},
                     {{MultiIndex{0, 0}, 8.0}, {MultiIndex{1, 0}, -2.0}, {MultiIndex{0, 1}, -2.0}});
  auto base = check_psd(explicit_P(aff, MultiIndex{1, 1}), pts, 1e-9);
  auto scaled = check_psd(explicit_P(doubled, MultiIndex{1, 1}), pts, 1e-9);
  CHECK(base.pass);
  CHECK(scaled.pass == base.pass);
  CHECK_THAT(scaled.min_eig, WithinAbs(4.0 * base.min_eig, 1e-9));

  // Gram subspace kernels are positive semidefinite by construction
  auto table = compute_moments(aff, MultiIndex{7, 7});
  auto idx = IndexSet::b_set(MultiIndex{1, 1}).enumerate(MultiIndex{8, 8});
  auto gram_kernel = KernelHandle::gram_subspace(table, idx);
  auto gram_rec = check_psd(gram_kernel, pts, 1e-9);
  CHECK(gram_rec.pass);
  CHECK(gram_rec.min_eig >= -1e-9 * std::max(1.0, gram_rec.max_eig));

  CHECK_THROWS_AS(check_psd(ones.pass ? KernelHandle::constant(2, 1.0) : gram_kernel, pts, 0.0),
                  std::invalid_argument);
}

TEST_CASE("contractivity check distinguishes axes") {
  // P of f = z2 is the one-variable geometric kernel 1/(1 - z1 zeta1*):
  // contractive in z1, not in z2
  auto K = explicit_P(Polynomial::constant(2, 1.0, MultiIndex{0, 1}), MultiIndex{0, 1});
  Point a{Complex(0.0, 0.0), Complex(0.0, 0.0)};
  Point b{Complex(0.0, 0.0), Complex(0.5, 0.0)};
  auto pts = PointSet::explicit_points({a, b});

  auto recs = check_contractive(K, {1, 2}, pts, 1e-9);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].id.find("z1") != std::string::npos);
  CHECK(recs[0].pass);
  CHECK(recs[1].id.find("z2") != std::string::npos);
  CHECK_FALSE(recs[1].pass);
  CHECK(recs[1].min_eig < -0.1);

  CHECK_THROWS_AS(check_contractive(K, {}, pts, 1e-9), std::invalid_argument);
}

TEST_CASE("ordering check compares kernels through their difference") {
  auto pts = PointSet::random(2, 5, 0.5, 9);
  CHECK(check_ordering(KernelHandle::constant(2, 2.0), KernelHandle::constant(2, 1.0), pts, 1e-9)
            .pass);
  CHECK_FALSE(
      check_ordering(KernelHandle::constant(2, 1.0), KernelHandle::constant(2, 2.0), pts, 1e-9)
          .pass);

  // nested subsets: K_{1}^N dominates the full-set kernel 1/C_0
  auto aff = corpus::affine(4.0, {1.0, 1.0});
  auto table = compute_moments(aff, MultiIndex{7, 7});
  DecompositionSpec spec(aff, MultiIndex{1, 1}, {1}, 8);
  auto KS = build_KS(spec, table);
  auto full = KernelHandle::gram_subspace(
      table, IndexSet::x_union({}, MultiIndex{1, 1}).enumerate(MultiIndex{8, 8}));
  auto rec = check_ordering(KS, full, pts, 1e-9);
  CHECK(rec.pass);
  CHECK(rec.id.find("ordering:") == 0);
}

TEST_CASE("suite passes for the trivial bidisk polynomial") {
  auto report = run_suite(one2(), MultiIndex{1, 1});
  CHECK(report.pass);
  CHECK(report.stability.stable);
  CHECK(report.grid_used == 128);
  CHECK(report.point_mode == "random:12:0.600000:1234");
  REQUIRE(report.checks.size() == 20);
  CHECK(report.checks[0].id == "stability");
  CHECK(report.checks[0].pass);
  for (const auto& rec : report.checks) {
    INFO(rec.id);
    CHECK(rec.pass);
  }

  auto has = [&](const std::string& id) {
    for (const auto& rec : report.checks)
      if (rec.id == id) return true;
    return false;
  };
  CHECK(has("moments:aliasing"));
  CHECK(has("gram:eigenvalue-sandwich"));
  CHECK(has("moments:reflected-orthogonality"));
  CHECK(has("split:{1}"));
  CHECK(has("split:{2}"));
  CHECK(has("difference:{1}"));
  CHECK(has("contractive:z1:K{1}^16"));
  CHECK(has("contractive:z1:L{1}^16"));
  CHECK(has("ordering:K{1}^16>=K{1,2}^16"));
  CHECK(has("ordering:K{2}^16>=K{1,2}^16"));
  CHECK(has("agler:identity"));
  CHECK(has("gkvw:identity:j1k2"));

  // identical config implies identical records, timestamp aside
  auto again = run_suite(one2(), MultiIndex{1, 1});
  REQUIRE(again.checks.size() == report.checks.size());
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    INFO(report.checks[i].id);
    CHECK(same_record(report.checks[i], again.checks[i]));
  }
}

TEST_CASE("suite certifies the affine corpus member") {
  SuiteConfig config;
  config.grid = 256;
  auto report = run_suite(corpus::affine(4.0, {1.0, 1.0}), MultiIndex{1, 1}, config);
  CHECK(report.grid_used == 256);
  for (const auto& rec : report.checks) {
    INFO(rec.id << " min_eig=" << rec.min_eig << " resid=" << rec.max_residual);
    CHECK(rec.pass);
  }
  CHECK(report.pass);
}

TEST_CASE("suite rejects unstable polynomials before any computation") {
  Polynomial boundary(2, MultiIndex{1, 1},
                      {{MultiIndex{0, 0}, 2.0}, {MultiIndex{1, 0}, -1.0}, {MultiIndex{0, 1}, -1.0}});
  auto report = run_suite(boundary, MultiIndex{1, 1});
  CHECK_FALSE(report.pass);
  CHECK_FALSE(report.stability.stable);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].id == "stability");
  CHECK_FALSE(report.checks[0].pass);
}

TEST_CASE("suite covers three variables") {
  auto report = run_suite(Polynomial::constant(3, 1.0, MultiIndex{1, 1, 1}), MultiIndex{1, 1, 1});
  for (const auto& rec : report.checks) {
    INFO(rec.id << " min_eig=" << rec.min_eig << " resid=" << rec.max_residual);
    CHECK(rec.pass);
  }
  CHECK(report.pass);
  REQUIRE(report.checks.size() == 49);

  CHECK_THROWS_AS(run_suite(Polynomial::constant(1, 1.0, MultiIndex{1}), MultiIndex{1}),
                  std::invalid_argument);
  SuiteConfig bad;
  bad.ladder = {8, 8};
  CHECK_THROWS_AS(run_suite(one2(), MultiIndex{1, 1}, bad), std::invalid_argument);
}
