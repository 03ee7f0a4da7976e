#include <catch2/catch_amalgamated.hpp>

#include "horolmmp/mmp.hpp"
#include "support/spaces.hpp"

using namespace horo;
using namespace testdata;

namespace {

MMPReport run_pair(const SpaceData& s, const BStableDivisor& d, const BStableDivisor& delta) {
  return run(make_horospherical_pair(s, d, delta));
}

std::vector<BreakpointEvent::Kind> event_kinds(const MMPReport& r) {
  std::vector<BreakpointEvent::Kind> out;
  for (const auto& e : r.events) out.push_back(e.kind);
  return out;
}

}  // namespace

TEST_CASE("run on the rank-one family with Delta = 0") {
  MMPReport r = run_pair(sl3_space(), sl3_D(), BStableDivisor::zero(sl3_space()));
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].label == "X(0,0)");
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].kind == BreakpointEvent::Kind::fiber_type);
  const FiberData& fd = *r.events[0].fiber;
  CHECK(fd.M1_mcoords.rank() == 0);
  CHECK(fd.added_wall_colors.empty());
  CHECK(fd.fiber_rank == 1);
  CHECK(fd.fiber_class_rank == 1);
  CHECK_FALSE(fd.fiber_is_point);
  // Z carries both colors and no G-stable divisors: the full flag datum
  CHECK(fd.z_quad.space.s() == 2);
  CHECK(fd.z_quad.space.r() == 0);
  CHECK(class_rank(fd.z_quad) == 2);
}

TEST_CASE("run on the rank-one family with Delta = X1+X2") {
  BStableDivisor delta{{Rat(1), Rat(1)}, {Rat(0), Rat(0)}};
  MMPReport r = run_pair(sl3_space(), sl3_D(), delta);
  REQUIRE(r.steps.size() == 4);
  CHECK(r.steps[0].label == "X(0,0)");
  CHECK(r.steps[1].label == "X(1,0)");
  CHECK(r.steps[2].label == "Y(1,1)");
  CHECK(r.steps[3].label == "X(1,1)");
  CHECK(r.steps[2].is_y);

  REQUIRE(r.events.size() == 3);
  CHECK(r.events[0].kind == BreakpointEvent::Kind::divisorial);
  CHECK(*r.events[0].eps == 1);
  CHECK(r.events[0].contracted_gstable == std::vector<std::size_t>{0});  // X1
  CHECK(r.events[1].kind == BreakpointEvent::Kind::flip);
  CHECK(*r.events[1].eps == 2);
  CHECK(r.events[1].wall_before == std::vector<std::size_t>{1});     // {beta}
  CHECK(r.events[1].wall_at == std::vector<std::size_t>{0, 1});      // {alpha, beta}
  CHECK(r.events[1].wall_after == std::vector<std::size_t>{0});      // {alpha}
  CHECK(r.events[2].kind == BreakpointEvent::Kind::fiber_type);
  CHECK(*r.events[2].eps == Rat(5, 2));
  const FiberData& fd = *r.events[2].fiber;
  CHECK(fd.added_wall_colors == std::vector<std::size_t>{0});  // alpha
  CHECK(fd.M1_mcoords.rank() == 0);
  REQUIRE(fd.q_eps_max_vertices.size() == 1);
  CHECK(fd.q_eps_max_vertices[0] == rv({0, 1}));  // the point w_beta
  // surviving divisors: X1 dies at eps = 1
  CHECK(r.steps[0].surviving_gstable == std::vector<std::size_t>{0, 1});
  CHECK(r.steps[1].surviving_gstable == std::vector<std::size_t>{1});
  CHECK(r.steps[3].surviving_gstable == std::vector<std::size_t>{1});
}

TEST_CASE("run on the second triangle example with delta3 = 4") {
  BStableDivisor delta = ex_delta(0, 0, 4, 0);
  MMPReport r = run_pair(ex_space(), ex2_D(), delta);
  auto kinds = event_kinds(r);
  REQUIRE(kinds.size() == 2);
  CHECK(kinds[0] == BreakpointEvent::Kind::flip);
  CHECK(*r.events[0].eps == Rat(1, 4));
  CHECK(kinds[1] == BreakpointEvent::Kind::stabilized);
  CHECK_FALSE(r.cls.eps_max);
}

TEST_CASE("run rejects uncertified pairs and zero perturbations") {
  // ex1 with Delta = 0 has K not Q-Cartier
  auto pair = make_horospherical_pair(ex_space(), ex1_D(), BStableDivisor::zero(ex_space()));
  CHECK_FALSE(pair.certified_pair);
  CHECK_THROWS_WITH(run(pair), Catch::Matchers::ContainsSubstring("not certified"));
  // Delta = -K makes the perturbation zero
  auto zero = make_horospherical_pair(sl3_space(), sl3_D(), anticanonical(sl3_space()));
  CHECK_THROWS_WITH(run(zero), Catch::Matchers::ContainsSubstring("zero perturbation"));
}

TEST_CASE("classify_breakpoint on the rank-one family with Delta = X1+X2") {
  SpaceData s = sl3_space();
  BStableDivisor delta{{Rat(1), Rat(1)}, {Rat(0), Rat(0)}};
  Family f = build_family(s, sl3_D(), k_plus_delta(s, delta));
  auto cls = breakpoints(f);
  auto e1 = classify_breakpoint(f, Rat(1), Rat(1, 2), Rat(3, 2), cls);
  CHECK(e1.kind == BreakpointEvent::Kind::divisorial);
  CHECK(e1.contracted_gstable == std::vector<std::size_t>{0});
  auto e2 = classify_breakpoint(f, Rat(2), Rat(3, 2), Rat(9, 4), cls);
  CHECK(e2.kind == BreakpointEvent::Kind::flip);
  auto e3 = classify_breakpoint(f, Rat(5, 2), Rat(9, 4), std::nullopt, cls);
  CHECK(e3.kind == BreakpointEvent::Kind::fiber_type);
}

TEST_CASE("classify_breakpoint on the second triangle example") {
  Family f = build_family(ex_space(), ex2_D(),
                          k_plus_delta(ex_space(), BStableDivisor::zero(ex_space())));
  auto cls = breakpoints(f);
  auto e = classify_breakpoint(f, Rat(2, 3), Rat(1, 2), std::nullopt, cls);
  CHECK(e.kind == BreakpointEvent::Kind::fiber_type);
}

TEST_CASE("fiber data of the second triangle example with delta3 = 0") {
  MMPReport r = run_pair(ex_space(), ex2_D(), BStableDivisor::zero(ex_space()));
  auto kinds = event_kinds(r);
  REQUIRE(kinds.size() == 2);
  CHECK(kinds[0] == BreakpointEvent::Kind::flip);
  CHECK(*r.events[0].eps == Rat(1, 4));
  CHECK(kinds[1] == BreakpointEvent::Kind::fiber_type);
  CHECK(*r.events[1].eps == Rat(2, 3));
  const FiberData& fd = *r.events[1].fiber;
  CHECK(fd.M1_mcoords.rank() == 1);
  CHECK(fd.added_wall_colors == std::vector<std::size_t>{0});
  CHECK(fd.fiber_rank == 1);
  CHECK_FALSE(fd.fiber_is_point);
  CHECK(fd.fiber_class_rank == 1);
  // the fiber polytope is a segment with one endpoint on the wall
  auto vs = vertices(fd.fiber_polytope);
  REQUIRE(vs.size() == 2);
  CHECK(dimension_of(vs) == 1);
  REQUIRE(fd.quotient_coords == std::vector<std::size_t>{0});
  std::vector<Rat> pairings;
  for (const auto& v : vs) pairings.push_back(v.point[0]);  // <., alpha^vee> descends to q1
  std::sort(pairings.begin(), pairings.end());
  CHECK(pairings[0] == 0);
  CHECK(pairings[1] > 0);
  // Z is a rank-one toric datum with two ends: the C*-embedding P1
  CHECK(fd.z_quad.space.s() == 0);
  CHECK(fd.z_quad.space.r() == 2);
  CHECK(fd.z_quad.space.n() == 1);
}

TEST_CASE("fiber of the first triangle example, lc case") {
  BStableDivisor delta = ex_delta(-1, 0, 0, 1);
  MMPReport r = run_pair(ex_space(), ex1_D(), delta);
  REQUIRE(r.cls.eps_max);
  CHECK(*r.cls.eps_max == 1);
  REQUIRE(r.events.size() == 1);
  const FiberData& fd = *r.events[0].fiber;
  REQUIRE(fd.q_eps_max_vertices.size() == 1);
  CHECK(fd.q_eps_max_vertices[0] == rv({0, 2}));
  CHECK(fd.M1_mcoords.rank() == 0);
  CHECK(fd.added_wall_colors == std::vector<std::size_t>{0});
  // fiber is the whole variety: projection by a rank-0 lattice
  CHECK(fd.fiber_rank == 2);
  CHECK_FALSE(fd.fiber_is_point);
  CHECK(fd.z_quad.space.r() == 0);
  CHECK(fd.z_quad.space.s() == 0);
}

TEST_CASE("verify_signs passes on the worked runs") {
  for (auto r : {run_pair(sl3_space(), sl3_D(), BStableDivisor::zero(sl3_space())),
                 run_pair(sl3_space(), sl3_D(), BStableDivisor{{Rat(1), Rat(1)}, {Rat(0), Rat(0)}}),
                 run_pair(ex_space(), ex2_D(), BStableDivisor::zero(ex_space())),
                 run_pair(rect_space(), rect_D(), BStableDivisor::zero(rect_space()))}) {
    auto v = verify_signs(r);
    INFO(r.steps[0].label);
    CHECK(v.pass);
    CHECK_FALSE(v.lines.empty());
  }
}

TEST_CASE("verify_signs sees the fiber-type edge slope -2") {
  MMPReport r = run_pair(sl3_space(), sl3_D(), BStableDivisor::zero(sl3_space()));
  auto v = verify_signs(r);
  bool found = false;
  for (const auto& l : v.lines)
    if (l.what.find("= -2") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("verify_signs on a stabilized run checks nothing") {
  MMPReport r = run_pair(ex_space(), ex1_D(), ex_delta(0, 0, Rat(5, 3), Rat(4, 3)));
  auto v = verify_signs(r);
  CHECK(v.pass);
  CHECK(v.lines.empty());
}

TEST_CASE("verify_pair_chain on the rank-one run with Delta = X1+X2") {
  BStableDivisor delta{{Rat(1), Rat(1)}, {Rat(0), Rat(0)}};
  MMPReport r = run_pair(sl3_space(), sl3_D(), delta);
  auto v = verify_pair_chain(r);
  CHECK(v.pass);
  // Y(1,1) must be certified as NOT Q-Cartier
  bool y_checked = false;
  for (const auto& l : v.lines)
    if (l.what.find("Y(1,1)") != std::string::npos) {
      y_checked = true;
      CHECK(l.pass);
    }
  CHECK(y_checked);
}

TEST_CASE("verify_pair_chain tracks singularity classes") {
  MMPReport klt_run = run_pair(sl3_space(), sl3_D(), BStableDivisor::zero(sl3_space()));
  CHECK(klt_run.input_class == SingularityClass::klt);
  CHECK(verify_pair_chain(klt_run).pass);

  BStableDivisor delta = ex_delta(-1, 0, 0, 1);  // lc, not klt
  MMPReport lc_run = run_pair(ex_space(), ex1_D(), delta);
  CHECK(lc_run.input_class == SingularityClass::lc_not_klt);
  CHECK(verify_pair_chain(lc_run).pass);
}

TEST_CASE("morphism_exists") {
  SECTION("the worked quadrilateral-to-triangle map") {
    SpaceData s;
    s.weight_dim = 2;
    s.basis_labels = {"alpha", "omega0"};
    s.colors = {{"alpha", {Int(1), Int(0)}, Int(2), 0}};
    s.lattice_M = LatticeBasis::standard(2);
    s.gstable = {{"X1", {Int(1), Int(-1)}}, {"X2", {Int(-1), Int(0)}}, {"X3", {Int(2), Int(1)}}};
    // quadrilateral (0,4),(0,5),(1,6),(1,2)
    BStableDivisor d4{{Rat(5), Rat(1), Rat(-4)}, {Rat(0)}};
    // triangle (0,4),(1,5),(1,2)
    BStableDivisor d1{{Rat(4), Rat(1), Rat(-4)}, {Rat(0)}};
    MomentQuadruple q = build_quadruple(s, d4);
    MomentQuadruple qp = build_quadruple(s, d1);
    auto orbit = morphism_exists(q, qp);
    REQUIRE(orbit);
    // psi([AD]) = A': the wall facet (0,4)-(0,5) maps to the vertex (0,4)
    bool found = false;
    for (const auto& entry : *orbit) {
      if (entry.source_face.size() == 2 && entry.source_face[0] == rv({0, 4}) &&
          entry.source_face[1] == rv({0, 5})) {
        found = true;
        REQUIRE(entry.image_face.size() == 1);
        CHECK(entry.image_face[0] == rv({0, 4}));
      }
    }
    CHECK(found);
    // no morphism the other way: the triangle's vertex fans out
    CHECK_FALSE(morphism_exists(qp, q));
  }
  SECTION("identity") {
    MomentQuadruple q = build_quadruple(sl3_space(), sl3_D());
    auto orbit = morphism_exists(q, q);
    REQUIRE(orbit);
    for (const auto& entry : *orbit)
      if (entry.source_face.size() == 1) CHECK(entry.image_face == entry.source_face);
  }
  SECTION("rank-one example: X7 maps to X9") {
    // Q7: segment (3,2)..(5,6); Q9: segment (0,1)..(2,5) whose wall end is a
    // color facet, so X9 has a single G-stable divisor
    MomentQuadruple q7 = build_quadruple(sl3_space(), sl3_D());
    SpaceData s9 = sl3_space();
    s9.gstable = {{"X2", {Int(-1)}}};
    BStableDivisor d9{{Rat(2)}, {Rat(0), Rat(1)}};
    MomentQuadruple q9 = build_quadruple(s9, d9);
    CHECK(morphism_exists(q7, q9));
    CHECK_FALSE(morphism_exists(q9, q7));  // q9 touches W_alpha, q7 does not
  }
}

TEST_CASE("ray_check") {
  SECTION("second triangle example: every event is a ray contraction") {
    auto pair = make_horospherical_pair(ex_space(), ex2_D(), BStableDivisor::zero(ex_space()));
    MMPReport r = run(pair);
    auto rc = ray_check(r, pair);
    REQUIRE(rc.applicable);
    CHECK(rc.pass);
    CHECK_FALSE(rc.lines.empty());
  }
  SECTION("degenerate B reports the violating rows") {
    auto pair = make_horospherical_pair(ex_space(), ex1_D(), ex_delta(-1, 0, 0, 1));
    MMPReport r = run(pair);
    auto rc = ray_check(r, pair);
    CHECK_FALSE(rc.applicable);
    CHECK(rc.violating_rows == std::vector<std::size_t>{0, 1, 3});
  }
}

TEST_CASE("max_epsilon widens the stabilization scan window") {
  BStableDivisor delta = ex_delta(0, 0, Rat(5, 3), Rat(4, 3));
  auto pair = make_horospherical_pair(ex_space(), ex1_D(), delta);
  MMPOptions opts;
  opts.max_epsilon = Rat(10);
  MMPReport r = run(pair, opts);
  CHECK_FALSE(r.cls.eps_max);
  CHECK(r.cls.scan_window == 10);
  MMPReport rdefault = run(pair);
  CHECK(rdefault.cls.scan_window == 1);  // no positive candidates: 4*0 + 1
}

TEST_CASE("restarting from an intermediate step is suffix-consistent") {
  BStableDivisor delta{{Rat(1), Rat(1)}, {Rat(0), Rat(0)}};
  MMPReport r = run_pair(sl3_space(), sl3_D(), delta);
  // restart from X(1,0)
  const MMPStep& st = r.steps[1];
  auto pair2 = make_horospherical_pair(st.step_space, st.step_D, st.delta_push);
  REQUIRE(pair2.certified_pair);
  MMPReport r2 = run(pair2);
  auto kinds = event_kinds(r2);
  REQUIRE(kinds.size() == 2);
  CHECK(kinds[0] == BreakpointEvent::Kind::flip);
  CHECK(kinds[1] == BreakpointEvent::Kind::fiber_type);
  // breakpoints shift by the representative parameter of the restart step
  Rat shift = st.interval.rep;
  CHECK(*r2.events[0].eps == Rat(2) - shift);
  CHECK(*r2.events[1].eps == Rat(5, 2) - shift);
}
