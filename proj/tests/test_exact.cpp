#include <catch2/catch_amalgamated.hpp>

#include "horolmmp/lattice.hpp"
#include "horolmmp/linalg.hpp"
#include "support/spaces.hpp"

using namespace horo;
using testdata::iv;
using testdata::rv;

TEST_CASE("rationals are canonical and serialize as p/q") {
  CHECK(rat_str(Rat(6, 4)) == "3/2");
  CHECK(rat_str(Rat(-6, 4)) == "-3/2");
  CHECK(rat_str(Rat(7, 1)) == "7");
  CHECK(rat_str(Rat(0)) == "0");
  CHECK(rat_num(Rat(-6, 4)) == -3);
  CHECK(rat_den(Rat(-6, 4)) == 2);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rat("3/2") == Rat(3, 2));
  CHECK(parse_rat("-3/2") == Rat(-3, 2));
  CHECK(parse_rat("7") == 7);
  CHECK(parse_rat("+7") == 7);
  CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rat("1.5"), ParseError);
  CHECK_THROWS_AS(parse_rat(" 1"), ParseError);
  CHECK_THROWS_AS(parse_rat("1/-2"), ParseError);
  CHECK_THROWS_AS(parse_rat(""), ParseError);
}

TEST_CASE("arithmetic is exact: (a+b)-b = a") {
  // deterministic pseudo-random rationals with large denominators
  std::uint64_t state = 42;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  };
  for (int i = 0; i < 200; ++i) {
    Rat a(Int(next() % 20011) - 10000, Int(next() % 997 + 1));
    Rat b(Int(next() % 20011) - 10000, Int(next() % 997 + 1));
    CHECK((a + b) - b == a);
    if (b != 0) CHECK((a / b) * b == a);
  }
}

TEST_CASE("floor and ceil") {
  CHECK(rat_floor(Rat(7, 2)) == 3);
  CHECK(rat_floor(Rat(-7, 2)) == -4);
  CHECK(rat_ceil(Rat(7, 2)) == 4);
  CHECK(rat_ceil(Rat(-7, 2)) == -3);
  CHECK(rat_floor(Rat(4)) == 4);
}

TEST_CASE("solve_square on the identity") {
  RatMat a = RatMat::from_rows({rv({1, 0}), rv({0, 1})}, 2);
  auto x = solve_square(a, {Rat(3), Rat(-1, 2)});
  REQUIRE(x);
  CHECK(*x == RatVec{Rat(3), Rat(-1, 2)});
}

TEST_CASE("solve_square recovers a triangle vertex") {
  RatMat a = RatMat::from_rows({rv({1, -1}), rv({2, 1})}, 2);
  auto x = solve_square(a, rv({-3, 3}));
  REQUIRE(x);
  CHECK(*x == rv({0, 3}));
}

TEST_CASE("solve_square reports singular matrices") {
  RatMat a = RatMat::from_rows({rv({1, 2}), rv({2, 4})}, 2);
  CHECK_FALSE(solve_square(a, rv({1, 1})));
  CHECK_FALSE(solve_square(a, rv({1, 2})));
}

TEST_CASE("solve_square checks dimensions") {
  RatMat a = RatMat::from_rows({rv({1, 2})}, 2);
  CHECK_THROWS_AS(solve_square(a, rv({1})), DimensionError);
}

TEST_CASE("A * solve_square(A, b) = b on random invertible systems") {
  std::uint64_t state = 7;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + next() % 4;
    RatMat a(n, n);
    RatVec b(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = Rat(Int(next() % 11) - 5, Int(next() % 4 + 1));
      b[i] = Rat(Int(next() % 11) - 5);
    }
    auto x = solve_square(a, b);
    if (!x) continue;
    CHECK(mat_vec(a, *x) == b);
  }
}

TEST_CASE("primitive_and_length") {
  SECTION("gcd in Z") {
    auto [p, len] = primitive_and_length(iv({2}), LatticeBasis::standard(1));
    CHECK(p == iv({1}));
    CHECK(len == 2);
  }
  SECTION("gcd along a rank-1 lattice") {
    LatticeBasis l(2, {iv({1, 2})});
    auto [p, len] = primitive_and_length(iv({4, 8}), l);
    CHECK(p == iv({1, 2}));
    CHECK(len == 4);
  }
  SECTION("edge of the rank-one interval [-1, 1] has length 2") {
    // endpoints -1 and 1 in M-coordinates
    CHECK(integral_length({Rat(2)}, LatticeBasis::standard(1)) == 2);
  }
  SECTION("fractional vectors") {
    CHECK(integral_length({Rat(1, 2), Rat(1)}, LatticeBasis::standard(2)) == Rat(1, 2));
  }
  SECTION("zero vector is an error") {
    CHECK_THROWS_AS(primitive_and_length(iv({0, 0}), LatticeBasis::standard(2)), DomainError);
  }
  SECTION("outside the lattice span is an error") {
    LatticeBasis l(2, {iv({1, 0})});
    CHECK_THROWS_AS(primitive_and_length(iv({0, 1}), l), DomainError);
  }
  SECTION("primitive output has coordinate gcd 1") {
    LatticeBasis l(3, {iv({2, 0, 1}), iv({0, 3, 0})});
    auto [p, len] = primitive_and_length(iv({12, 18, 6}), l);
    // coordinates in the lattice basis: (6, 6) -> primitive (1, 1)
    CHECK(p == iv({2, 3, 1}));
    CHECK(len == 6);
  }
}

TEST_CASE("lattice_intersect_subspace") {
  SECTION("coordinate axis") {
    auto l = lattice_intersect_subspace(LatticeBasis::standard(2), {rv({1, 0})});
    REQUIRE(l.rank() == 1);
    CHECK((l.basis_rows[0] == iv({1, 0}) || l.basis_rows[0] == iv({-1, 0})));
  }
  SECTION("diagonal") {
    auto l = lattice_intersect_subspace(LatticeBasis::standard(2), {rv({1, 1})});
    REQUIRE(l.rank() == 1);
    CHECK((l.basis_rows[0] == iv({1, 1}) || l.basis_rows[0] == iv({-1, -1})));
  }
  SECTION("zero subspace") {
    LatticeBasis l(2, {iv({1, 2})});
    auto z = lattice_intersect_subspace(l, {});
    CHECK(z.rank() == 0);
  }
  SECTION("saturation: (2,2)-direction inside Z^2 yields the primitive generator") {
    auto l = lattice_intersect_subspace(LatticeBasis::standard(2), {rv({2, 2})});
    REQUIRE(l.rank() == 1);
    CHECK(ivec_gcd(l.basis_rows[0]) == 1);
  }
  SECTION("subspace outside the span is an error") {
    LatticeBasis l(2, {iv({1, 0})});
    CHECK_THROWS_AS(lattice_intersect_subspace(l, {rv({0, 1})}), DomainError);
  }
}

TEST_CASE("lattice_intersect_subspace is saturated on random instances") {
  std::uint64_t state = 11;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  };
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t d = 2 + next() % 2;  // ambient 2..3
    // random full lattice Z^d, random subspace spanned by one or two lattice
    // vectors
    std::vector<RatVec> span;
    std::size_t k = 1 + next() % 2;
    for (std::size_t i = 0; i < k; ++i) {
      RatVec v(d);
      for (std::size_t j = 0; j < d; ++j) v[j] = Rat(Int(next() % 7) - 3);
      span.push_back(v);
    }
    auto l = lattice_intersect_subspace(LatticeBasis::standard(d), span);
    // every lattice point of the subspace must be an integer combination of
    // the returned basis: test random integer combinations of the span after
    // clearing denominators
    for (int probe = 0; probe < 5; ++probe) {
      RatVec pt(d, Rat(0));
      for (const auto& v : span) {
        Int c = Int(next() % 7) - 3;
        for (std::size_t j = 0; j < d; ++j) pt[j] += Rat(c) * v[j];
      }
      bool integral = true;
      for (const Rat& x : pt)
        if (rat_den(x) != 1) integral = false;
      if (!integral) continue;
      CHECK(in_lattice(pt, l));
    }
  }
}
