#include <catch2/catch_amalgamated.hpp>

#include "polypick/corpus.hpp"
#include "polypick/kernels.hpp"

using namespace polypick;
using Catch::Matchers::WithinAbs;

namespace {
Polynomial half_z() {
  return Polynomial(1, MultiIndex{1}, {{MultiIndex{0}, 1.0}, {MultiIndex{1}, -0.5}});
}
Polynomial sep23() {
  return corpus::separable({{Complex(1.0, 0.0), Complex(-0.5, 0.0)},
                            {Complex(1.0, 0.0), Complex(-1.0 / 3.0, 0.0)}});
}
}  // namespace

TEST_CASE("gram entries follow the moment differences") {
  auto table = compute_moments(half_z(), MultiIndex{4});
  auto g = build_gram(table, {MultiIndex{0}, MultiIndex{1}});
  CHECK_THAT(std::abs(g.matrix()(0, 0) - Complex(4.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(g.matrix()(0, 1) - Complex(2.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(g.matrix()(1, 0) - Complex(2.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-12));
  auto [lo, hi] = g.eigenvalue_range();
  CHECK_THAT(lo, WithinAbs(2.0 / 3.0, 1e-12));
  CHECK_THAT(hi, WithinAbs(2.0, 1e-12));
  CHECK(g.condition_estimate() >= 1.0);
}

TEST_CASE("lebesgue monomials are orthonormal") {
  Polynomial one = Polynomial::constant(2, 1.0, MultiIndex{1, 1});
  auto table = compute_moments(one, MultiIndex{4, 4});
  auto indices = IndexSet::b_set(MultiIndex{1, 1}).enumerate(MultiIndex{4, 4});
  auto g = build_gram(table, indices);
  CHECK((g.matrix() - Eigen::MatrixXcd::Identity(g.size(), g.size())).cwiseAbs().maxCoeff() <
        1e-13);
}

TEST_CASE("rank one gram holds the mass of the measure") {
  auto table = compute_moments(sep23(), MultiIndex{2, 2});
  auto g = build_gram(table, {MultiIndex{0, 0}});
  CHECK_THAT(std::abs(g.matrix()(0, 0) - Complex(1.5, 0.0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("index validation") {
  auto table = compute_moments(half_z(), MultiIndex{2});
  CHECK_THROWS_AS(build_gram(table, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_gram(table, {MultiIndex{0}, MultiIndex{0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_gram(table, {MultiIndex{0}, MultiIndex{3}}), std::out_of_range);
}

TEST_CASE("defect kernel of a univariate linear factor is constant") {
  auto p = half_z();
  auto table = compute_moments(p, MultiIndex{2});
  auto g = build_gram(table, {MultiIndex{0}});
  auto P = explicit_P(p, MultiIndex{1});
  for (double t : {0.0, 0.3, -0.7}) {
    Point z{Complex(t, 0.1)};
    CHECK_THAT(std::abs(g.rk_evaluate(z, z) - Complex(0.75, 0.0)), WithinAbs(0.0, 1e-12));
    CHECK_THAT(std::abs(P.eval(z, z) - Complex(0.75, 0.0)), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("padding the degree box changes the defect subspace") {
  auto p = half_z();
  auto table = compute_moments(p, MultiIndex{2});
  auto g = build_gram(table, {MultiIndex{0}, MultiIndex{1}});
  Point zero{Complex(0.0, 0.0)};
  CHECK_THAT(std::abs(g.rk_evaluate(zero, zero) - Complex(1.0, 0.0)), WithinAbs(0.0, 1e-12));
  auto P2 = explicit_P(p, MultiIndex{2});
  CHECK_THAT(std::abs(P2.eval(zero, zero) - Complex(1.0, 0.0)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("orthonormal truncation sums squared monomials") {
  Polynomial one = Polynomial::constant(2, 1.0, MultiIndex{1, 1});
  auto table = compute_moments(one, MultiIndex{2, 2});
  auto g = build_gram(table, {MultiIndex{0, 0}, MultiIndex{0, 1}, MultiIndex{1, 0}});
  Point a{Complex(0.5, 0.0), Complex(0.5, 0.0)};
  CHECK_THAT(std::abs(g.rk_evaluate(a, a) - Complex(1.5, 0.0)), WithinAbs(0.0, 1e-13));
}

TEST_CASE("reproducing property holds after the solve") {
  auto p = half_z();
  auto table = compute_moments(p, MultiIndex{4});
  auto g = build_gram(table, {MultiIndex{0}, MultiIndex{1}, MultiIndex{2}});
  CHECK(reproducing_property_residual(g, table, {Complex(0.0, 0.0)}) <= 1e-10);
  CHECK(reproducing_property_residual(g, table, {Complex(0.3, 0.0)}) < 1e-10);

  Polynomial one = Polynomial::constant(1, 1.0, MultiIndex{1});
  auto t1 = compute_moments(one, MultiIndex{4});
  auto gi = build_gram(t1, {MultiIndex{0}, MultiIndex{1}});
  CHECK(reproducing_property_residual(gi, t1, {Complex(0.4, 0.2)}) < 1e-15);
}

TEST_CASE("one-variable defect kernel matches the closed form everywhere") {
  // finite defect set in one variable: the Gram kernel and the explicit
  // formula describe the same Christoffel-Darboux object
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    auto sample = corpus::random_univariate(seed);
    const int n = sample.poly.degree()[0];
    // roots can sit at modulus 1.1, so the moments decay slowly: use a fine
    // grid to push aliasing far below the comparison tolerance
    auto table = compute_moments(sample.poly, MultiIndex{std::max(1, n - 1)}, 512);
    std::vector<MultiIndex> indices;
    for (int k = 0; k < n; ++k) indices.push_back(MultiIndex{k});
    auto g = build_gram(table, indices);
    auto P = explicit_P(sample.poly, MultiIndex{n});
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        Point z{Complex(-0.72 + 0.16 * i, 0.05)};
        Point w{Complex(0.03, -0.68 + 0.15 * j)};
        worst = std::max(worst, std::abs(g.rk_evaluate(z, w) - P.eval(z, w)));
      }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("gram spectrum sits inside the density bounds") {
  auto p = corpus::affine(4.0, {Complex(1.0, 0.0), Complex(1.0, 0.0)});
  auto table = compute_moments(p, MultiIndex{7, 7});
  auto g = build_gram(table, IndexSet::b_set(MultiIndex{1, 1}).enumerate(MultiIndex{8, 8}));
  auto [lo, hi] = g.eigenvalue_range();
  auto [pmin, pmax] = torus_abs_extrema(p, 512);
  CHECK(lo >= 1.0 / (pmax * pmax) - 1e-6);
  CHECK(hi <= 1.0 / (pmin * pmin) + 1e-6);
}

TEST_CASE("diagonal grows with the subspace") {
  auto p = sep23();
  auto table = compute_moments(p, MultiIndex{3, 3});
  auto inner = build_gram(table, IndexSet::x_single(1, MultiIndex{1, 1}).enumerate(MultiIndex{4, 4}));
  auto outer = build_gram(table, IndexSet::b_set(MultiIndex{1, 1}).enumerate(MultiIndex{4, 4}));
  for (double r : {0.0, 0.25, 0.5}) {
    Point z{Complex(r, 0.1), Complex(-r, 0.2)};
    CHECK(inner.rk_evaluate(z, z).real() <= outer.rk_evaluate(z, z).real() + 1e-10);
  }
}

TEST_CASE("szego product values") {
  auto S = KernelHandle::szego(2);
  std::vector<Point> pts{{Complex(0.0, 0.0), Complex(0.0, 0.0)},
                         {Complex(0.5, 0.0), Complex(0.0, 0.0)}};
  auto M = kernel_matrix(S, pts);
  CHECK_THAT(std::abs(M(0, 0) - Complex(1.0, 0.0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(M(0, 1) - Complex(1.0, 0.0)), WithinAbs(0.0, 1e-15));
  CHECK_THAT(std::abs(M(1, 1) - Complex(4.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-15));
  CHECK(hermitian_defect(M) < 1e-14);
}

TEST_CASE("closed-form defect kernel values") {
  Polynomial one2 = Polynomial::constant(2, 1.0, MultiIndex{1, 1});
  auto P = explicit_P(one2, MultiIndex{1, 1});
  Point a{Complex(0.5, 0.0), Complex(0.5, 0.0)};
  CHECK_THAT(std::abs(P.eval(a, a) - Complex(5.0 / 3.0, 0.0)), WithinAbs(0.0, 1e-14));

  auto Psep = explicit_P(sep23(), MultiIndex{1, 1});
  Point zero{Complex(0.0, 0.0), Complex(0.0, 0.0)};
  CHECK_THAT(std::abs(Psep.eval(zero, zero) - Complex(35.0 / 36.0, 0.0)), WithinAbs(0.0, 1e-14));
}

TEST_CASE("kernel handles stay Hermitian") {
  auto p = corpus::random_determinantal(2, 5, 0.5);
  auto table = compute_moments(p, MultiIndex{3, 3});
  auto g = std::make_shared<const GramMatrix>(
      table, IndexSet::b_set(MultiIndex{1, 1}).enumerate(MultiIndex{4, 4}));
  auto K = KernelHandle::p_normalized(
      KernelHandle::shift_factor(1, KernelHandle::gram_subspace(g)), p);
  Point z{Complex(0.3, 0.2), Complex(-0.1, 0.4)};
  Point w{Complex(-0.2, 0.1), Complex(0.5, -0.3)};
  CHECK_THAT(std::abs(K.eval(z, w) - std::conj(K.eval(w, z))), WithinAbs(0.0, 1e-12));
  CHECK_THAT(std::abs(K.eval(z, z).imag()), WithinAbs(0.0, 1e-12));
}

TEST_CASE("shifting the wrong variable loses positivity") {
  // K = 1/(1 - z1 conj(zeta1)) in two variables, via the defect kernel of
  // the constant polynomial with degree box (0,1)
  Polynomial one2 = Polynomial::constant(2, 1.0, MultiIndex{0, 1});
  auto K = explicit_P(one2, MultiIndex{0, 1});
  std::vector<Point> pts{{Complex(0.0, 0.0), Complex(0.0, 0.0)},
                         {Complex(0.0, 0.0), Complex(0.5, 0.0)}};
  auto good = kernel_matrix(KernelHandle::shift_factor(1, K), pts);
  CHECK((good - Eigen::MatrixXcd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

  auto bad = kernel_matrix(KernelHandle::shift_factor(2, K), pts);
  CHECK_THAT(std::abs(bad(1, 1) - Complex(0.75, 0.0)), WithinAbs(0.0, 1e-14));
  auto eigs = hermitian_eigenvalues(bad);
  CHECK(eigs(0) < -0.1);
}

TEST_CASE("combinators evaluate lazily and check domains") {
  auto S = KernelHandle::szego(2);
  auto zero = KernelHandle::difference(S, S);
  Point z{Complex(0.1, 0.0), Complex(0.2, 0.0)};
  CHECK(zero.eval(z, z) == Complex(0.0, 0.0));
  auto two = KernelHandle::sum(KernelHandle::constant(2, 1.0), KernelHandle::constant(2, 1.0));
  CHECK(two.eval(z, z) == Complex(2.0, 0.0));
  CHECK_THROWS_AS(S.eval({Complex(1.0, 0.0), Complex(0.0, 0.0)}, z), std::domain_error);
  CHECK_THROWS_AS(KernelHandle::shift_factor(3, S), std::invalid_argument);
  CHECK_THROWS_AS(KernelHandle::sum(S, KernelHandle::szego(3)), std::invalid_argument);
}
