#include <catch2/catch_amalgamated.hpp>

#include "polypick/lattice.hpp"

using namespace polypick;

TEST_CASE("graded lex order compares degree first") {
  CHECK(MultiIndex{0, 0} < MultiIndex{0, 1});
  CHECK(MultiIndex{0, 1} < MultiIndex{1, 0});
  CHECK(MultiIndex{1, 0} < MultiIndex{0, 2});
  CHECK(MultiIndex{0, 2} < MultiIndex{1, 1});
  CHECK_FALSE(MultiIndex{1, 1} < MultiIndex{1, 1});
  CHECK(MultiIndex{2, 0, 0} < MultiIndex{0, 0, 3});
}

TEST_CASE("componentwise order is partial") {
  CHECK(leq(MultiIndex{1, 0}, MultiIndex{1, 2}));
  CHECK_FALSE(leq(MultiIndex{1, 2}, MultiIndex{2, 1}));
  CHECK_FALSE(leq(MultiIndex{2, 1}, MultiIndex{1, 2}));
  CHECK_THROWS_AS(leq(MultiIndex{1}, MultiIndex{1, 2}), std::invalid_argument);
}

TEST_CASE("multi-index arithmetic") {
  MultiIndex a{2, 1}, b{1, 3};
  CHECK(a + b == MultiIndex{3, 4});
  CHECK(a - b == MultiIndex{1, -2});
  CHECK((a - b).total_degree() == -1);
  CHECK_FALSE((a - b).nonnegative());
  CHECK_THROWS_AS(a + MultiIndex{1}, std::invalid_argument);
}

TEST_CASE("defect set enumeration in a small box") {
  auto B = IndexSet::b_set(MultiIndex{1, 1});
  auto got = B.enumerate(MultiIndex{2, 2});
  std::vector<MultiIndex> want{{0, 0}, {0, 1}, {1, 0}};
  CHECK(got == want);
}

TEST_CASE("single-variable slab enumeration order") {
  auto X1 = IndexSet::x_single(1, MultiIndex{2, 1});
  auto got = X1.enumerate(MultiIndex{3, 3});
  std::vector<MultiIndex> want{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {1, 2}};
  CHECK(got == want);
}

TEST_CASE("defect set count is N^d - prod(N - n_j)") {
  struct Case {
    MultiIndex n;
    int N;
  };
  for (const auto& c : {Case{{1, 1}, 4}, Case{{2, 3}, 8}, Case{{1, 2, 1}, 5}, Case{{2, 2, 2}, 6}}) {
    int d = c.n.dim();
    auto members = IndexSet::b_set(c.n).enumerate(MultiIndex::constant(d, c.N));
    long expect = 1, inner = 1;
    for (int j = 0; j < d; ++j) {
      expect *= c.N;
      inner *= c.N - c.n[j];
    }
    CHECK(static_cast<long>(members.size()) == expect - inner);
  }
}

TEST_CASE("union over all variables equals the defect set") {
  MultiIndex n{2, 1, 2};
  auto all = IndexSet::x_union({1, 2, 3}, n);
  auto B = IndexSet::b_set(n);
  auto box = MultiIndex{4, 4, 4};
  CHECK(all.enumerate(box) == B.enumerate(box));
}

TEST_CASE("empty union is the origin singleton") {
  auto X0 = IndexSet::x_union({}, MultiIndex{2, 2});
  CHECK(X0.contains(MultiIndex{0, 0}));
  CHECK_FALSE(X0.contains(MultiIndex{1, 0}));
  auto got = X0.enumerate(MultiIndex{5, 5});
  REQUIRE(got.size() == 1);
  CHECK(got[0] == MultiIndex{0, 0});
}

TEST_CASE("combinators agree with membership brute force") {
  MultiIndex n{2, 2};
  auto a = IndexSet::x_single(1, n);
  auto b = IndexSet::shifted_orthant(MultiIndex{1, 0});
  auto exprs = {set_union(a, b), set_intersect(a, b), set_difference(a, b),
                set_difference(IndexSet::b_set(n), a)};
  for (const auto& e : exprs) {
    auto members = e.enumerate(MultiIndex{5, 5});
    std::size_t count = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        MultiIndex alpha{i, j};
        bool in = e.contains(alpha);
        if (in) ++count;
        bool listed = std::find(members.begin(), members.end(), alpha) != members.end();
        CHECK(in == listed);
      }
    CHECK(count == members.size());
  }
}

TEST_CASE("box and singleton membership") {
  auto box = IndexSet::box(MultiIndex{2, 3});
  CHECK(box.contains(MultiIndex{1, 2}));
  CHECK_FALSE(box.contains(MultiIndex{2, 0}));
  auto s = IndexSet::singleton(MultiIndex{1, 1});
  CHECK(s.enumerate(MultiIndex{3, 3}).size() == 1);
  CHECK_FALSE(s.contains(MultiIndex{1, 0}));
}

TEST_CASE("invalid constructions are rejected") {
  CHECK_THROWS_AS(IndexSet::box(MultiIndex{2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(IndexSet::x_single(3, MultiIndex{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(IndexSet::x_union({1, 1}, MultiIndex{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(IndexSet::b_set(MultiIndex{1, -1}), std::invalid_argument);
  auto B = IndexSet::b_set(MultiIndex{1, 1});
  CHECK_THROWS_AS(B.contains(MultiIndex{1}), std::invalid_argument);
  CHECK_THROWS_AS(B.enumerate(MultiIndex{4, -4}), std::invalid_argument);
  CHECK_THROWS_AS(set_union(B, IndexSet::orthant(3)), std::invalid_argument);
}

TEST_CASE("variable set complement") {
  CHECK(complement_vars({1}, 3) == std::vector<int>{2, 3});
  CHECK(complement_vars({2, 3}, 3) == std::vector<int>{1});
  CHECK(complement_vars({1, 2}, 2).empty());
  CHECK_THROWS_AS(complement_vars({0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(complement_vars({1, 1}, 2), std::invalid_argument);
}
