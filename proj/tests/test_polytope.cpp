#include <catch2/catch_amalgamated.hpp>

#include "horolmmp/polytope.hpp"
#include "support/spaces.hpp"

using namespace horo;
using testdata::rv;

namespace {

HPolytope interval_11() {
  // {x >= -1, -x >= -1}
  return HPolytope(RatMat::from_rows({rv({1}), rv({-1})}, 1), rv({-1, -1}));
}

HPolytope ex1_triangle() {
  // rows [[1,-1],[2,1],[-1,0],[1,0]], rhs (-3,3,-2,0)
  return HPolytope(RatMat::from_rows({rv({1, -1}), rv({2, 1}), rv({-1, 0}), rv({1, 0})}, 2),
                   rv({-3, 3, -2, 0}));
}

}  // namespace

TEST_CASE("vertices of an interval") {
  auto vs = vertices(interval_11());
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].point == rv({-1}));
  CHECK(vs[0].tight_rows == std::vector<std::size_t>{0});
  CHECK(vs[1].point == rv({1}));
  CHECK(vs[1].tight_rows == std::vector<std::size_t>{1});
}

TEST_CASE("vertices of the triangle example") {
  auto vs = vertices(ex1_triangle());
  REQUIRE(vs.size() == 3);
  CHECK(vs[0].point == rv({0, 3}));
  CHECK(vs[1].point == rv({2, -1}));
  CHECK(vs[2].point == rv({2, 5}));
  // (0,3) is degenerate: rows 0, 1 and 3 meet there
  CHECK(vs[0].tight_rows == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("vertices of the rank-one family at eps = 0") {
  HPolytope p(RatMat::from_rows({rv({1}), rv({-1}), rv({1}), rv({2})}, 1), rv({-1, -1, -4, -4}));
  auto vs = vertices(p);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].point == rv({-1}));
  CHECK(vs[1].point == rv({1}));
}

TEST_CASE("empty polytope gives an empty vertex list") {
  HPolytope p(RatMat::from_rows({rv({1}), rv({-1})}, 1), rv({1, 1}));  // x >= 1, x <= -1
  CHECK(vertices(p).empty());
  CHECK(dimension(p) == -1);
}

TEST_CASE("unbounded polyhedra are an error") {
  HPolytope half(RatMat::from_rows({rv({1})}, 1), rv({0}));
  CHECK_THROWS_AS(vertices(half), DomainError);
  HPolytope strip(RatMat::from_rows({rv({1, 0}), rv({-1, 0})}, 2), rv({0, -1}));
  CHECK_THROWS_AS(vertices(strip), DomainError);
}

TEST_CASE("dimension") {
  CHECK(dimension(interval_11()) == 1);
  HPolytope pt(RatMat::from_rows({rv({1}), rv({-1})}, 1), rv({0, 0}));
  CHECK(dimension(pt) == 0);
  // rank-one family at eps = 1 (Delta = 0 case): the point {0}
  HPolytope p(RatMat::from_rows({rv({1}), rv({-1}), rv({1}), rv({2})}, 1), rv({0, 0, -2, -2}));
  CHECK(dimension(p) == 0);
}

TEST_CASE("facet_rows") {
  SECTION("redundant row is not a facet") {
    HPolytope p(RatMat::from_rows({rv({1}), rv({-1}), rv({1})}, 1), rv({-1, -1, -2}));
    CHECK(facet_rows(p) == std::vector<std::size_t>{0, 1});
  }
  SECTION("two rows supporting the same facet are both reported") {
    // x >= -1, x <= 1, x >= -2, x >= -1: rows 0 and 3 support the facet {-1}
    HPolytope p(RatMat::from_rows({rv({1}), rv({-1}), rv({1}), rv({1})}, 1), rv({-1, -1, -2, -1}));
    CHECK(facet_rows(p) == std::vector<std::size_t>{0, 1, 3});
  }
  SECTION("triangle example: row 3 is not a facet") {
    CHECK(facet_rows(ex1_triangle()) == std::vector<std::size_t>{0, 1, 2});
  }
}

TEST_CASE("face_dim") {
  HPolytope iv = interval_11();
  CHECK(face_dim(iv, {0}) == 0);
  CHECK(face_dim(iv, {0, 1}) == -1);
  CHECK(face_dim(iv, {}) == dimension(iv));
  CHECK(face_dim(ex1_triangle(), {0, 1}) == 0);  // the vertex (0,3)
  CHECK(face_dim(ex1_triangle(), {}) == 2);
}

TEST_CASE("edges") {
  CHECK(edges(interval_11()).size() == 1);
  CHECK(edges(ex1_triangle()).size() == 3);
  HPolytope pt(RatMat::from_rows({rv({1}), rv({-1})}, 1), rv({0, 0}));
  CHECK(edges(pt).empty());
}

TEST_CASE("edge endpoints share enough tight rows") {
  auto vs = vertices(ex1_triangle());
  for (auto& [a, b] : edges_of(vs)) {
    std::vector<std::size_t> common;
    std::set_intersection(a.tight_rows.begin(), a.tight_rows.end(), b.tight_rows.begin(),
                          b.tight_rows.end(), std::back_inserter(common));
    // dim(p) - 1 rows with spanning normals
    CHECK(!common.empty());
  }
}

TEST_CASE("adding a row never increases dimension") {
  HPolytope base = ex1_triangle();
  std::uint64_t state = 3;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  };
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<RatVec> rows;
    for (std::size_t i = 0; i < base.m(); ++i) rows.push_back(base.rows.row(i));
    RatVec extra{Rat(Int(next() % 7) - 3), Rat(Int(next() % 7) - 3)};
    if (vec_is_zero(extra)) continue;
    rows.push_back(extra);
    RatVec rhs = base.rhs;
    rhs.push_back(Rat(Int(next() % 13) - 6));
    HPolytope bigger(RatMat::from_rows(rows, 2), rhs);
    auto res = enumerate_vertices(bigger);
    if (res.status != PolytopeStatus::ok) continue;
    CHECK(dimension_of(res.verts) <= dimension(base));
  }
}

TEST_CASE("vertex enumeration agrees with the brute-force subset oracle") {
  // oracle: solve every n-subset, keep feasible solutions, deduplicate
  auto oracle = [](const HPolytope& p) {
    std::set<RatVec> pts;
    std::vector<std::size_t> idx(p.n());
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t k) {
      if (k == p.n()) {
        RatMat sub(p.n(), p.n());
        RatVec b(p.n());
        for (std::size_t i = 0; i < p.n(); ++i) {
          for (std::size_t j = 0; j < p.n(); ++j) sub(i, j) = p.rows(idx[i], j);
          b[i] = p.rhs[idx[i]];
        }
        auto x = solve_square(sub, b);
        if (x && p.contains(*x)) pts.insert(*x);
        return;
      }
      for (std::size_t i = start; i < p.m(); ++i) {
        idx[k] = i;
        rec(i + 1, k + 1);
      }
    };
    rec(0, 0);
    return pts;
  };

  std::uint64_t state = 5;
  auto next = [&] {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  };
  int tested = 0;
  for (int trial = 0; trial < 120 && tested < 40; ++trial) {
    std::size_t n = 1 + next() % 3;
    std::size_t m = n + 1 + next() % 5;
    std::vector<RatVec> rows;
    RatVec rhs;
    // box the polytope so it stays bounded
    for (std::size_t j = 0; j < n; ++j) {
      RatVec up(n, Rat(0)), dn(n, Rat(0));
      up[j] = 1;
      dn[j] = -1;
      rows.push_back(up);
      rhs.push_back(Rat(-(Int(next() % 4) + 1)));
      rows.push_back(dn);
      rhs.push_back(Rat(-(Int(next() % 4) + 1)));
    }
    for (std::size_t i = 0; i < m; ++i) {
      RatVec a(n);
      bool zero = true;
      for (std::size_t j = 0; j < n; ++j) {
        a[j] = Rat(Int(next() % 7) - 3);
        if (a[j] != 0) zero = false;
      }
      if (zero) continue;
      rows.push_back(a);
      rhs.push_back(Rat(Int(next() % 9) - 6));
    }
    HPolytope p(RatMat::from_rows(rows, n), rhs);
    auto res = enumerate_vertices(p);
    REQUIRE(res.status != PolytopeStatus::unbounded);  // boxed
    auto expect = oracle(p);
    REQUIRE(res.verts.size() == expect.size());
    for (const auto& v : res.verts) CHECK(expect.count(v.point) == 1);
    ++tested;
  }
  CHECK(tested == 40);
}

TEST_CASE("project_affine_image") {
  SECTION("projection of a square onto a coordinate") {
    HPolytope square(
        RatMat::from_rows({rv({1, 0}), rv({-1, 0}), rv({0, 1}), rv({0, -1})}, 2),
        rv({0, -2, 0, -3}));
    RatMat l = RatMat::from_rows({rv({1, 0})}, 2);
    HPolytope img = project_affine_image(square, l, rv({0}));
    auto vs = vertices(img);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].point == rv({0}));
    CHECK(vs[1].point == rv({2}));
  }
  SECTION("lower-dimensional image keeps its affine hull") {
    // segment {(t, 2t) : t in [0,1]} as the image of [0,1]
    HPolytope seg(RatMat::from_rows({rv({1}), rv({-1})}, 1), rv({0, -1}));
    RatMat l = RatMat::from_rows({rv({1}), rv({2})}, 1);
    HPolytope img = project_affine_image(seg, l, rv({0, 0}));
    CHECK(dimension(img) == 1);
    auto vs = vertices(img);
    REQUIRE(vs.size() == 2);
    CHECK(vs[0].point == rv({0, 0}));
    CHECK(vs[1].point == rv({1, 2}));
  }
  SECTION("image of an empty polytope is empty") {
    HPolytope none(RatMat::from_rows({rv({1}), rv({-1})}, 1), rv({1, 1}));
    RatMat l = RatMat::from_rows({rv({1})}, 1);
    HPolytope img = project_affine_image(none, l, rv({0}));
    CHECK(vertices(img).empty());
  }
}
