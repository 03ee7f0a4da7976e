#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "horolmmp/family.hpp"

namespace horo {

struct HorosphericalPair {
  SpaceData space;
  BStableDivisor D;      // ample, defines X
  BStableDivisor delta;  // the boundary
  bool certified_pair = false;
};

inline BStableDivisor k_plus_delta(const SpaceData& s, const BStableDivisor& delta) {
  return div_sub(delta, anticanonical(s));
}

inline HorosphericalPair make_horospherical_pair(const SpaceData& s, const BStableDivisor& d,
                                                 const BStableDivisor& delta) {
  check_divisor(s, d);
  check_divisor(s, delta);
  HorosphericalPair p{s, d, delta, false};
  p.certified_pair = is_q_cartier(s, d, k_plus_delta(s, delta));
  return p;
}

// One variety in the run: X(i,j) on a parameter interval or Y(i,j) at an
// isolated parameter.
struct MMPStep {
  std::string label;
  bool is_y = false;
  ClassInterval interval;
  std::vector<std::size_t> surviving_gstable;  // indices into the input space's gstable
  SpaceData step_space;
  BStableDivisor step_D;       // ample divisor at the representative parameter
  BStableDivisor delta_push;   // pushforward of Delta
  MomentQuadruple quad;        // quadruple at the representative parameter
};

struct FiberData {
  std::vector<std::size_t> added_wall_colors;  // indices into space.colors
  LatticeBasis M1_mcoords;                     // saturated, in M-coordinates
  LatticeBasis M1_weight;                      // the same lattice in weight coordinates
  MomentQuadruple z_quad;
  std::vector<RatVec> q_eps_max_vertices;      // weight coordinates
  std::vector<std::size_t> quotient_coords;    // weight coordinates kept by the projection
  HPolytope fiber_polytope;                    // in quotient coordinates
  int fiber_rank = 0;
  bool fiber_is_point = false;
  int fiber_class_rank = 0;
};

struct BreakpointEvent {
  enum class Kind { divisorial, flip, fiber_type, stabilized } kind;
  std::optional<Rat> eps;  // empty only for stabilized
  std::vector<std::size_t> contracted_gstable;
  std::vector<std::size_t> wall_before, wall_at, wall_after;  // flips
  std::optional<FiberData> fiber;
  std::optional<Signature> stable_sig;
};

inline const char* to_string(BreakpointEvent::Kind k) {
  switch (k) {
    case BreakpointEvent::Kind::divisorial: return "divisorial";
    case BreakpointEvent::Kind::flip: return "flip";
    case BreakpointEvent::Kind::fiber_type: return "fiber_type";
    default: return "stabilized";
  }
}

struct MMPReport {
  SpaceData space;
  BStableDivisor D, delta, kd;
  SingularityClass input_class = SingularityClass::klt;
  Family family;
  EpsilonClassification cls;
  std::vector<MMPStep> steps;
  std::vector<BreakpointEvent> events;
};

namespace detail {

// G-stable rows that are divisors of the variety at this slice: facet-defining
// with the facet in no wall.
inline std::vector<std::size_t> surviving_gstable_rows(const Family& f, const FamilySlice& s) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < f.space.r(); ++k) {
    if (!std::binary_search(s.facets.begin(), s.facets.end(), k)) continue;
    std::vector<std::size_t> fverts;
    for (std::size_t i = 0; i < s.verts.size(); ++i)
      if (tight_contains(s.verts[i], k)) fverts.push_back(i);
    bool in_wall = false;
    for (std::size_t j = 0; j < f.space.s() && !in_wall; ++j) {
      std::size_t crow = f.space.color_row_index(j);
      bool all = true;
      for (std::size_t i : fverts)
        if (!tight_contains(s.verts[i], crow)) {
          all = false;
          break;
        }
      in_wall = all;
    }
    if (!in_wall) out.push_back(k);
  }
  return out;
}

inline MMPStep make_step(const Family& f, const BStableDivisor& delta, ClassInterval interval,
                         std::string label, bool is_y) {
  FamilySlice slice = polytope_at(f, interval.rep);
  MMPStep st;
  st.label = std::move(label);
  st.is_y = is_y;
  st.interval = std::move(interval);
  st.surviving_gstable = surviving_gstable_rows(f, slice);

  st.step_space = f.space;
  st.step_space.gstable.clear();
  BStableDivisor d;
  BStableDivisor dp;
  for (std::size_t k : st.surviving_gstable) {
    st.step_space.gstable.push_back(f.space.gstable[k]);
    d.gstable_coeffs.push_back(-slice.q_tilde.rhs[k]);
    dp.gstable_coeffs.push_back(delta.gstable_coeffs[k]);
  }
  for (std::size_t j = 0; j < f.space.s(); ++j) {
    d.color_coeffs.push_back(-slice.q_tilde.rhs[f.space.color_row_index(j)]);
    dp.color_coeffs.push_back(delta.color_coeffs[j]);
  }
  st.step_D = std::move(d);
  st.delta_push = std::move(dp);
  try {
    st.quad = build_quadruple(st.step_space, st.step_D);
  } catch (const Error& e) {
    throw InternalError("step " + st.label + " does not define a polarized variety: " + e.what());
  }
  return st;
}

}  // namespace detail

// Z and the general-fiber data of the terminal fiber-type contraction.
inline FiberData fiber_data(const Family& f, const EpsilonClassification& cls) {
  if (!cls.eps_max) throw DomainError("fiber_data: the family does not terminate");
  const SpaceData& s = f.space;
  const std::size_t n = s.n(), d = s.weight_dim;
  FamilySlice star = polytope_at(f, *cls.eps_max);
  if (star.verts.empty()) throw DomainError("fiber_data: empty polytope at eps_max");
  if (gh_check(f, star).ok) throw DomainError("fiber_data: Q^eps_max is still a G/H-polytope");

  FiberData out;
  for (std::size_t i = 0; i < star.verts.size(); ++i)
    out.q_eps_max_vertices.push_back(q_vertex_weight(f, star, i));

  // direction lattice M1 = M cap span{v_j - v_0}, saturated
  std::vector<RatVec> dirs;
  for (std::size_t i = 1; i < star.verts.size(); ++i)
    dirs.push_back(vec_sub(star.verts[i].point, star.verts[0].point));
  out.M1_mcoords = lattice_intersect_subspace(LatticeBasis::standard(n), dirs);
  const std::size_t n1 = out.M1_mcoords.rank();
  {
    std::vector<IntVec> wrows;
    for (const IntVec& row : out.M1_mcoords.basis_rows) {
      IntVec wr(d, Int(0));
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < d; ++j) wr[j] += row[k] * s.lattice_M.basis_rows[k][j];
      wrows.push_back(std::move(wr));
    }
    out.M1_weight = LatticeBasis(d, std::move(wrows));
  }

  // walls containing Q^eps_max
  std::vector<bool> added(s.s(), false);
  for (std::size_t j = 0; j < s.s(); ++j) {
    std::size_t crow = s.color_row_index(j);
    bool all = true;
    for (const auto& v : star.verts)
      if (!tight_contains(v, crow)) {
        all = false;
        break;
      }
    if (all) {
      added[j] = true;
      out.added_wall_colors.push_back(j);
    }
  }

  // Z: quadruple over (remaining colors, M1). The pseudo-moment polytope is
  // Q~^eps_max translated by its lex-least vertex into M1_Q.
  const RatVec p0 = star.verts[0].point;
  SpaceData zspace;
  zspace.weight_dim = d;
  zspace.basis_labels = s.basis_labels;
  zspace.lattice_M = out.M1_weight;
  for (std::size_t j = 0; j < s.s(); ++j)
    if (!added[j]) zspace.colors.push_back(s.colors[j]);

  RatVec v_z = vec_add(star.veps, s.embed(p0));
  BStableDivisor dz;
  if (n1 > 0) {
    // facets of Q~^eps_max, grouped by their vertex sets
    std::vector<std::pair<std::vector<std::size_t>, std::size_t>> facet_groups;
    for (std::size_t row : star.facets) {
      std::vector<std::size_t> fverts;
      for (std::size_t i = 0; i < star.verts.size(); ++i)
        if (tight_contains(star.verts[i], row)) fverts.push_back(i);
      bool seen = false;
      for (auto& [verts, first_row] : facet_groups)
        if (verts == fverts) {
          seen = true;
          break;
        }
      if (!seen) facet_groups.emplace_back(std::move(fverts), row);
    }
    std::size_t fcount = 0;
    for (auto& [fverts, row] : facet_groups) {
      bool in_wall = false;
      for (std::size_t j = 0; j < s.s() && !in_wall; ++j) {
        if (added[j]) continue;  // Q is entirely inside added walls
        std::size_t crow = s.color_row_index(j);
        bool all = true;
        for (std::size_t i : fverts)
          if (!tight_contains(star.verts[i], crow)) {
            all = false;
            break;
          }
        in_wall = all;
      }
      if (in_wall) continue;
      // restrict the supporting row to M1 coordinates and primitivize
      RatVec arow = star.q_tilde.rows.row(row);
      RatVec az(n1);
      for (std::size_t k = 0; k < n1; ++k) {
        Rat acc = 0;
        for (std::size_t t = 0; t < n; ++t) acc += arow[t] * Rat(out.M1_mcoords.basis_rows[k][t]);
        az[k] = acc;
      }
      Int denom = 1;
      for (const Rat& v : az) denom = denom / int_gcd(denom, rat_den(v)) * rat_den(v);
      IntVec w(n1);
      for (std::size_t k = 0; k < n1; ++k) w[k] = rat_num(az[k]) * (denom / rat_den(az[k]));
      Int g = ivec_gcd(w);
      if (g == 0) throw InternalError("fiber_data: facet normal vanishes on M1");
      for (Int& v : w) v /= g;
      Rat lambda(g, denom);  // az = lambda * w
      Rat rhs_z = star.q_tilde.rhs[row] - dot(arow, p0);
      zspace.gstable.push_back({"F" + std::to_string(fcount++), w});
      dz.gstable_coeffs.push_back(-rhs_z / lambda);
    }
  }
  for (std::size_t j = 0; j < s.s(); ++j)
    if (!added[j]) dz.color_coeffs.push_back(v_z[s.colors[j].weight_index]);
  out.z_quad = build_quadruple(zspace, dz);
  {
    // The rebuilt pseudo-moment polytope must be Q~^eps_max - p0 in
    // M1-coordinates.
    std::vector<RatVec> expect;
    for (const auto& v : star.verts) {
      auto c = lattice_coords(s.embed(vec_sub(v.point, p0)), out.M1_weight);
      if (!c) throw InternalError("fiber_data: vertex outside M1 span");
      expect.push_back(*c);
    }
    std::sort(expect.begin(), expect.end(), lex_less);
    if (vertex_points(out.z_quad.verts) != expect)
      throw InternalError("fiber_data: Z quadruple does not reproduce Q^eps_max");
  }

  // quotient coordinates: lex-first subset completing M1 to a basis of the
  // weight space
  const std::size_t t = d - n1;
  std::optional<std::vector<std::size_t>> chosen;
  detail::for_each_subset(d, t, [&](const std::vector<std::size_t>& idx) {
    if (chosen) return;
    RatMat m(n1 + t, d);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = Rat(out.M1_weight.basis_rows[i][j]);
    for (std::size_t i = 0; i < t; ++i) m(n1 + i, idx[i]) = 1;
    if (rank(std::move(m)) == d) chosen = idx;
  });
  if (!chosen) throw InternalError("fiber_data: no quotient coordinate subset");
  out.quotient_coords = *chosen;

  // projection matrix P: x = sum y_i e_{S_i} + (element of M1_Q); P x = y
  RatMat basis(d, d);
  for (std::size_t i = 0; i < t; ++i) basis((*chosen)[i], i) = 1;
  for (std::size_t k = 0; k < n1; ++k)
    for (std::size_t j = 0; j < d; ++j) basis(j, t + k) = Rat(out.M1_weight.basis_rows[k][j]);
  RatMat proj(t, d);
  for (std::size_t j = 0; j < d; ++j) {
    RatVec e(d, Rat(0));
    e[j] = 1;
    auto sol = solve_square(basis, e);
    if (!sol) throw InternalError("fiber_data: quotient basis is singular");
    for (std::size_t i = 0; i < t; ++i) proj(i, j) = (*sol)[i];
  }

  // fiber polytope: image of Q^eps for eps in the last open interval
  const ClassInterval& last = cls.intervals.back();
  auto project_at = [&](const Rat& eps) {
    FamilySlice sl = polytope_at(f, eps);
    RatMat l(t, n);
    RatMat emb = s.lattice_M.embedding();  // d x n
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        Rat acc = 0;
        for (std::size_t j = 0; j < d; ++j) acc += proj(i, j) * emb(j, k);
        l(i, k) = acc;
      }
    return project_affine_image(sl.q_tilde, l, mat_vec(proj, sl.veps));
  };
  out.fiber_polytope = project_at(last.rep);
  {
    // the projection is combinatorially constant on the interval
    Rat second = last.lo + (last.rep - last.lo) / 2;
    HPolytope other = project_at(second);
    auto va = vertices(out.fiber_polytope), vb = vertices(other);
    if (va.size() != vb.size() || dimension_of(va) != dimension_of(vb))
      throw InternalError("fiber polytope changes combinatorics inside the last interval");
  }

  auto fverts = vertices(out.fiber_polytope);
  int fdim = dimension_of(fverts);
  out.fiber_rank = static_cast<int>(n) - static_cast<int>(n1);
  out.fiber_is_point = fdim == 0;

  // facets of the fiber polytope that are not inside an added wall
  auto quotient_pairing = [&](const RatVec& y, std::size_t color) {
    Rat acc = 0;
    for (std::size_t i = 0; i < t; ++i)
      acc += y[i] * Rat(s.colors[color].coroot_pairings[out.quotient_coords[i]]);
    return acc;
  };
  std::vector<std::vector<std::size_t>> seen_facets;
  int r_f = 0;
  for (std::size_t row : facet_rows_of(out.fiber_polytope, fverts)) {
    std::vector<std::size_t> fv;
    for (std::size_t i = 0; i < fverts.size(); ++i)
      if (tight_contains(fverts[i], row)) fv.push_back(i);
    bool dup = false;
    for (auto& prev : seen_facets)
      if (prev == fv) {
        dup = true;
        break;
      }
    if (dup) continue;
    seen_facets.push_back(fv);
    bool in_wall = false;
    for (std::size_t j : out.added_wall_colors) {
      bool all = true;
      for (std::size_t i : fv)
        if (quotient_pairing(fverts[i].point, j) != 0) {
          all = false;
          break;
        }
      if (all) {
        in_wall = true;
        break;
      }
    }
    if (!in_wall) ++r_f;
  }
  out.fiber_class_rank =
      r_f + static_cast<int>(out.added_wall_colors.size()) - out.fiber_rank;
  return out;
}

// Classification of a single breakpoint against its neighbor classes.
inline BreakpointEvent classify_breakpoint(const Family& f, const Rat& eps_star,
                                           const Rat& left_rep, std::optional<Rat> right_rep,
                                           const EpsilonClassification& cls) {
  BreakpointEvent ev;
  ev.eps = eps_star;
  if (!right_rep) {
    ev.kind = BreakpointEvent::Kind::fiber_type;
    ev.fiber = fiber_data(f, cls);
    return ev;
  }
  FamilySlice at = polytope_at(f, eps_star);
  FamilySlice left = polytope_at(f, left_rep);
  FamilySlice right = polytope_at(f, *right_rep);
  bool eq_right = equivalent_slices(f, at, right);
  if (eq_right) {
    ev.kind = BreakpointEvent::Kind::divisorial;
    auto fis = facet_intervals(f, cls);
    for (std::size_t k = 0; k < f.space.r(); ++k)
      if (!fis[k].empty && fis[k].hi && *fis[k].hi == eps_star)
        ev.contracted_gstable.push_back(k);
    if (ev.contracted_gstable.empty())
      throw InternalError("divisorial event contracts no G-stable divisor at eps = " +
                          rat_str(eps_star));
    return ev;
  }
  if (equivalent_slices(f, left, at))
    throw DomainError("anomaly: breakpoint polytope at eps = " + rat_str(eps_star) +
                      " is equivalent to its left class only");
  ev.kind = BreakpointEvent::Kind::flip;
  ev.wall_before = left.wall_touch;
  ev.wall_at = at.wall_touch;
  ev.wall_after = right.wall_touch;
  return ev;
}

struct MMPOptions {
  std::optional<Rat> max_epsilon;
};

// Runs the Log MMP for (X, Delta) with the ample divisor D: classifies the
// polytope family, names the steps, and records one event per breakpoint.
inline MMPReport run(const HorosphericalPair& pair, const MMPOptions& opts = {}) {
  const SpaceData& s = pair.space;
  check_divisor(s, pair.D);
  check_divisor(s, pair.delta);
  BStableDivisor kd = k_plus_delta(s, pair.delta);
  if (kd.is_zero()) throw DomainError("zero perturbation direction");
  if (!pair.certified_pair || !is_q_cartier(s, pair.D, kd))
    throw DomainError("pair not certified: K+Delta is not Q-Cartier");

  MMPReport rep;
  rep.space = s;
  rep.D = pair.D;
  rep.delta = pair.delta;
  rep.kd = kd;
  rep.input_class = classify_singularities(pair.delta);
  rep.family = build_family(s, pair.D, kd);
  rep.cls = breakpoints(rep.family, opts.max_epsilon);

  int i = 0, j = 0;
  for (std::size_t t = 0; t < rep.cls.intervals.size(); ++t) {
    const ClassInterval& iv = rep.cls.intervals[t];
    std::string label;
    bool is_y = iv.singleton();
    if (t == 0) {
      label = "X(0,0)";
    } else if (is_y) {
      ++j;
      label = "Y(" + std::to_string(i) + "," + std::to_string(j) + ")";
    } else if (rep.cls.intervals[t - 1].singleton()) {
      label = "X(" + std::to_string(i) + "," + std::to_string(j) + ")";
    } else {
      ++i;
      j = 0;
      label = "X(" + std::to_string(i) + ",0)";
    }
    rep.steps.push_back(detail::make_step(rep.family, pair.delta, iv, label, is_y));
  }

  std::vector<EpsInterval> fis;
  for (std::size_t t = 1; t < rep.cls.intervals.size(); ++t) {
    const ClassInterval& iv = rep.cls.intervals[t];
    if (iv.singleton()) {
      if (t + 1 >= rep.cls.intervals.size())
        throw InternalError("flip location has no class on its right");
      BreakpointEvent ev;
      ev.kind = BreakpointEvent::Kind::flip;
      ev.eps = iv.lo;
      ev.wall_before = rep.cls.intervals[t - 1].sig.wall_touch;
      ev.wall_at = iv.sig.wall_touch;
      ev.wall_after = rep.cls.intervals[t + 1].sig.wall_touch;
      rep.events.push_back(std::move(ev));
    } else if (iv.lo_closed) {
      BreakpointEvent ev;
      ev.kind = BreakpointEvent::Kind::divisorial;
      ev.eps = iv.lo;
      if (fis.empty()) fis = facet_intervals(rep.family, rep.cls);
      for (std::size_t k = 0; k < s.r(); ++k)
        if (!fis[k].empty && fis[k].hi && *fis[k].hi == iv.lo) ev.contracted_gstable.push_back(k);
      if (ev.contracted_gstable.empty())
        throw InternalError("divisorial event contracts no G-stable divisor at eps = " +
                            rat_str(iv.lo));
      rep.events.push_back(std::move(ev));
    }
  }
  if (rep.cls.eps_max) {
    BreakpointEvent ev;
    ev.kind = BreakpointEvent::Kind::fiber_type;
    ev.eps = *rep.cls.eps_max;
    ev.fiber = fiber_data(rep.family, rep.cls);
    rep.events.push_back(std::move(ev));
  } else {
    BreakpointEvent ev;
    ev.kind = BreakpointEvent::Kind::stabilized;
    ev.stable_sig = rep.cls.intervals.back().sig;
    rep.events.push_back(std::move(ev));
  }
  return rep;
}

struct CheckLine {
  std::string what;
  bool pass = false;
  std::string detail;
};

struct VerificationReport {
  bool pass = true;
  std::vector<CheckLine> lines;

  void add(std::string what, bool ok, std::string det = "") {
    if (!ok) pass = false;
    lines.push_back({std::move(what), ok, std::move(det)});
  }
};

namespace detail {

inline std::string curve_name(const SpaceData& s, const CurveClass& c) {
  auto pt = [](const RatVec& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + rat_str(v[i]);
    return out + ")";
  };
  if (c.kind == CurveClass::Kind::edge) return "C_mu[" + pt(c.v1.point) + ".." + pt(c.v2.point) + "]";
  return "C_{" + s.colors[c.color].name + "," + pt(c.v1.point) + "}";
}

inline MomentQuadruple step_quadruple_at(const Family& f, const MMPStep& st, const Rat& eps) {
  FamilySlice sl = polytope_at(f, eps);
  BStableDivisor d;
  for (std::size_t k : st.surviving_gstable) d.gstable_coeffs.push_back(-sl.q_tilde.rhs[k]);
  for (std::size_t j = 0; j < f.space.s(); ++j)
    d.color_coeffs.push_back(-sl.q_tilde.rhs[f.space.color_row_index(j)]);
  return build_quadruple(st.step_space, d);
}

// One side of a breakpoint: the step quadruple at a parameter next to the
// breakpoint, plus the curves whose value degenerates to zero there.
// Detection extrapolates exactly from two parameters inside the open piece
// of the interval adjacent to the breakpoint, where vertex combinatorics are
// constant.
struct SideAnalysis {
  MomentQuadruple quad;  // at the sample parameter u
  struct Entry {
    CurveClass curve;  // lives on `quad`
    Rat slope;         // d(value)/d(eps) along the main family
    std::string name;
  };
  std::vector<Entry> contracted;
};

inline SideAnalysis analyze_side(const MMPReport& rep, const Rat& eps_star,
                                 std::size_t step_index) {
  const MMPStep& st = rep.steps[step_index];
  const Family& f = rep.family;

  Rat e_u, e_w;
  if (st.interval.hi && *st.interval.hi == eps_star) {
    // left side: sample in (c_low, eps_star), c_low the nearest candidate
    Rat c_low = st.interval.lo;
    for (const Rat& c : rep.cls.candidates)
      if (c < eps_star && c > c_low) c_low = c;
    e_u = c_low + (eps_star - c_low) / 2;
    e_w = c_low + (eps_star - c_low) * Rat(3, 4);
  } else {
    // right side of a flip: sample in (eps_star, c_high)
    std::optional<Rat> c_high;
    for (const Rat& c : rep.cls.candidates)
      if (c > eps_star && (!c_high || c < *c_high)) c_high = c;
    Rat span = c_high ? *c_high - eps_star : Rat(1);
    e_u = eps_star + span / 2;
    e_w = eps_star + span / 4;
  }

  SideAnalysis out;
  out.quad = step_quadruple_at(f, st, e_u);
  MomentQuadruple quad_w = step_quadruple_at(f, st, e_w);

  // match vertices across the piece by their tight sets
  std::map<std::vector<std::size_t>, std::size_t> w_by_tight;
  for (std::size_t i = 0; i < quad_w.verts.size(); ++i)
    w_by_tight[quad_w.verts[i].tight_rows] = i;
  auto partner = [&](const VertexRecord& v) -> const VertexRecord& {
    auto it = w_by_tight.find(v.tight_rows);
    if (it == w_by_tight.end())
      throw InternalError("vertex combinatorics changed inside an open piece");
    return quad_w.verts[it->second];
  };

  LatticeBasis std_lat = LatticeBasis::standard(st.step_space.n());
  for (auto& [curve, val_u] : curves(out.quad)) {
    Rat val_w;
    if (curve.kind == CurveClass::Kind::edge) {
      val_w = integral_length(vec_sub(partner(curve.v2).point, partner(curve.v1).point), std_lat);
    } else {
      RatVec wpt = vec_add(quad_w.translation_v, st.step_space.embed(partner(curve.v1).point));
      val_w = st.step_space.pairing(wpt, curve.color);
    }
    Rat slope = (val_w - val_u) / (e_w - e_u);
    Rat val_star = val_u + slope * (eps_star - e_u);
    if (val_star == 0)
      out.contracted.push_back({curve, slope, curve_name(st.step_space, curve)});
  }
  return out;
}

inline std::optional<std::size_t> step_ending_at(const MMPReport& rep, const Rat& eps) {
  for (std::size_t t = 0; t < rep.steps.size(); ++t) {
    const auto& iv = rep.steps[t].interval;
    if (!rep.steps[t].is_y && iv.hi && *iv.hi == eps) return t;
  }
  return std::nullopt;
}

inline std::optional<std::size_t> step_starting_at(const MMPReport& rep, const Rat& eps) {
  for (std::size_t t = 0; t < rep.steps.size(); ++t)
    if (!rep.steps[t].is_y && !rep.steps[t].interval.singleton() &&
        rep.steps[t].interval.lo == eps)
      return t;
  return std::nullopt;
}

}  // namespace detail

// (K + Delta) . C < 0 on every curve contracted at a breakpoint, and > 0 on
// the positive side of a flip. Signs are evaluated through the certified
// intersection routine and cross-checked against the family slope.
inline VerificationReport verify_signs(const MMPReport& rep) {
  VerificationReport out;
  for (const auto& ev : rep.events) {
    if (ev.kind == BreakpointEvent::Kind::stabilized) continue;
    const Rat eps_star = *ev.eps;
    auto check_side = [&](std::size_t step_idx, bool expect_negative) {
      const MMPStep& st = rep.steps[step_idx];
      BStableDivisor kd_step = k_plus_delta(st.step_space, st.delta_push);
      auto side = detail::analyze_side(rep, eps_star, step_idx);
      std::vector<CurveClass> cs;
      for (const auto& cc : side.contracted) cs.push_back(cc.curve);
      std::vector<Rat> vals =
          cs.empty() ? std::vector<Rat>{} : intersect_divisor_many(side.quad, kd_step, cs);
      for (std::size_t i = 0; i < side.contracted.size(); ++i) {
        const auto& cc = side.contracted[i];
        if (vals[i] != cc.slope)
          throw InternalError("intersection number disagrees with the family slope for " +
                              cc.name);
        bool ok = expect_negative ? vals[i] < 0 : vals[i] > 0;
        out.add(std::string(to_string(ev.kind)) + " at " + rat_str(eps_star) + ": (K+Delta)." +
                    cc.name + " = " + rat_str(vals[i]),
                ok, st.label);
      }
      if (side.contracted.empty())
        out.add(std::string(to_string(ev.kind)) + " at " + rat_str(eps_star) +
                    ": no contracted curve detected",
                false, st.label);
    };
    auto left = detail::step_ending_at(rep, eps_star);
    if (!left) throw InternalError("event with no step on its left");
    check_side(*left, true);
    if (ev.kind == BreakpointEvent::Kind::flip) {
      auto right = detail::step_starting_at(rep, eps_star);
      if (!right) throw InternalError("flip with no step on its right");
      check_side(*right, false);
    }
  }
  return out;
}

// X-steps carry Q-Cartier log divisors of no worse singularity class than the
// input; Y-steps do not.
inline VerificationReport verify_pair_chain(const MMPReport& rep) {
  VerificationReport out;
  auto rank_of = [](SingularityClass c) {
    return c == SingularityClass::klt ? 0 : c == SingularityClass::lc_not_klt ? 1 : 2;
  };
  for (const auto& st : rep.steps) {
    BStableDivisor kd_step = k_plus_delta(st.step_space, st.delta_push);
    bool qc = is_q_cartier(st.step_space, st.step_D, kd_step);
    if (st.is_y) {
      out.add(st.label + ": K+Delta not Q-Cartier", !qc);
    } else {
      out.add(st.label + ": K+Delta Q-Cartier", qc);
      SingularityClass sc = classify_singularities(st.delta_push);
      out.add(st.label + ": singularities " + to_string(sc) + " no worse than input " +
                  to_string(rep.input_class),
              rank_of(sc) <= rank_of(rep.input_class));
    }
  }
  return out;
}

struct RayCheckReport {
  bool applicable = false;
  std::string reason;
  std::vector<std::size_t> violating_rows;
  bool pass = true;
  std::vector<CheckLine> lines;
};

// With D general and X Q-factorial, every morphism of the run contracts a
// single ray: the class vectors of its contracted curves are pairwise
// positive rational multiples.
inline RayCheckReport ray_check(const MMPReport& rep, const HorosphericalPair& pair) {
  RayCheckReport out;
  auto gp = general_position(rep.family);
  if (!gp.ok) {
    out.reason = "B is degenerate: rows meet in a common point";
    out.violating_rows = gp.violating_rows;
    return out;
  }
  if (!is_q_factorial(pair.space, pair.D)) {
    out.reason = "X is not Q-factorial";
    return out;
  }
  out.applicable = true;

  // one class vector per curve: intersections with every prime B-stable
  // divisor of the step, batched per divisor
  auto class_vectors = [&](const SpaceData& step_space, const MomentQuadruple& quad,
                           const std::vector<CurveClass>& cs) {
    std::vector<RatVec> out(cs.size());
    auto push = [&](const BStableDivisor& unit) {
      std::vector<Rat> vals = intersect_divisor_many(quad, unit, cs);
      for (std::size_t i = 0; i < cs.size(); ++i) out[i].push_back(vals[i]);
    };
    for (std::size_t k = 0; k < step_space.r(); ++k) {
      BStableDivisor unit = BStableDivisor::zero(step_space);
      unit.gstable_coeffs[k] = 1;
      push(unit);
    }
    for (std::size_t j = 0; j < step_space.s(); ++j) {
      BStableDivisor unit = BStableDivisor::zero(step_space);
      unit.color_coeffs[j] = 1;
      push(unit);
    }
    return out;
  };
  auto positive_multiple = [](const RatVec& a, const RatVec& b) {
    if (vec_is_zero(a) || vec_is_zero(b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j)
        if (a[i] * b[j] != a[j] * b[i]) return false;
    return dot(a, b) > 0;
  };

  for (const auto& ev : rep.events) {
    if (ev.kind == BreakpointEvent::Kind::stabilized) continue;
    const Rat eps_star = *ev.eps;
    auto check_side = [&](std::size_t step_idx, const char* side) {
      const MMPStep& st = rep.steps[step_idx];
      auto analysis = detail::analyze_side(rep, eps_star, step_idx);
      std::vector<CurveClass> cs;
      for (const auto& cc : analysis.contracted) cs.push_back(cc.curve);
      std::vector<RatVec> classes =
          cs.empty() ? std::vector<RatVec>{} : class_vectors(st.step_space, analysis.quad, cs);
      bool ok = true;
      for (std::size_t a = 0; a + 1 < classes.size(); ++a)
        if (!positive_multiple(classes[a], classes[a + 1])) ok = false;
      if (!ok) out.pass = false;
      out.lines.push_back({std::string(to_string(ev.kind)) + " at " + rat_str(eps_star) + " (" +
                               side + "): " + std::to_string(analysis.contracted.size()) +
                               " contracted classes span one ray",
                           ok, st.label});
    };
    auto left = detail::step_ending_at(rep, eps_star);
    if (left) check_side(*left, "from");
    if (ev.kind == BreakpointEvent::Kind::flip) {
      auto right = detail::step_starting_at(rep, eps_star);
      if (right) check_side(*right, "flip positive side");
    }
  }
  return out;
}

// Face-level orbit map of a dominant equivariant morphism, when one exists.
struct OrbitMapEntry {
  std::vector<RatVec> source_face;  // vertices of a face of the source Q~
  std::vector<RatVec> image_face;   // vertices of its image in the target Q~
};

inline std::optional<std::vector<OrbitMapEntry>> morphism_exists(const MomentQuadruple& q,
                                                                 const MomentQuadruple& qp) {
  const SpaceData& s = q.space;
  const SpaceData& sp = qp.space;
  if (s.weight_dim != sp.weight_dim) throw DomainError("morphism: weight spaces differ");

  // M' must be a sublattice of M
  RatMat e(sp.n(), s.n());
  for (std::size_t i = 0; i < sp.n(); ++i) {
    auto c = lattice_coords(rat_vec(sp.lattice_M.basis_rows[i]), q.space.lattice_M);
    if (!c) throw DomainError("morphism: target lattice is not inside the source lattice");
    for (std::size_t k = 0; k < s.n(); ++k) {
      if (rat_den((*c)[k]) != 1)
        throw DomainError("morphism: target lattice is not inside the source lattice");
      e(i, k) = (*c)[k];
    }
  }
  // colors of the target must be colors of the source; dropped colors must
  // vanish on the target polytope
  for (const Color& cp : sp.colors) {
    bool found = false;
    for (const Color& c : s.colors)
      if (c.name == cp.name && c.coroot_pairings == cp.coroot_pairings) found = true;
    if (!found) throw DomainError("morphism: target color " + cp.name + " is not a source color");
  }
  for (std::size_t j = 0; j < s.s(); ++j) {
    bool kept = false;
    for (const Color& cp : sp.colors) kept = kept || cp.name == s.colors[j].name;
    if (kept) continue;
    for (std::size_t i = 0; i < qp.verts.size(); ++i)
      if (sp.pairing(qp.q_vertex(i), j) != 0)
        throw DomainError("morphism: target polytope is not inside the wall of dropped color " +
                          s.colors[j].name);
  }

  // target vertices in source M-coordinates
  std::vector<RatVec> vp_m;
  for (const auto& v : qp.verts) {
    RatVec out(s.n(), Rat(0));
    for (std::size_t i = 0; i < sp.n(); ++i)
      for (std::size_t k = 0; k < s.n(); ++k) out[k] += v.point[i] * e(i, k);
    vp_m.push_back(std::move(out));
  }

  // distinct facets of the source pseudo-moment polytope
  struct Facet {
    std::vector<std::size_t> verts;  // member vertices of q
    RatVec normal;
    Rat rhs;
  };
  std::vector<Facet> facets;
  for (std::size_t row : facet_rows_of(q.q_tilde, q.verts)) {
    std::vector<std::size_t> fv;
    for (std::size_t i = 0; i < q.verts.size(); ++i)
      if (tight_contains(q.verts[i], row)) fv.push_back(i);
    bool seen = false;
    for (auto& prev : facets)
      if (prev.verts == fv) seen = true;
    if (seen) continue;
    facets.push_back({fv, q.q_tilde.rows.row(row), q.q_tilde.rhs[row]});
  }

  // psi: each facet maps to the face of Q~' supported by the translated
  // half-space, or to the whole of Q~' when the half-space degenerates.
  std::vector<std::vector<std::size_t>> psi(facets.size());
  for (std::size_t fi = 0; fi < facets.size(); ++fi) {
    const Facet& fc = facets[fi];
    bool zero = true;
    std::vector<Rat> vals(vp_m.size());
    for (std::size_t i = 0; i < vp_m.size(); ++i) vals[i] = dot(fc.normal, vp_m[i]);
    RatVec restricted(sp.n(), Rat(0));
    for (std::size_t i = 0; i < sp.n(); ++i) {
      Rat acc = 0;
      for (std::size_t k = 0; k < s.n(); ++k) acc += e(i, k) * fc.normal[k];
      restricted[i] = acc;
      if (acc != 0) zero = false;
    }
    if (zero) {
      if (fc.rhs <= 0) {
        for (std::size_t i = 0; i < vp_m.size(); ++i) psi[fi].push_back(i);
      }
      // else: the half-space misses M'_Q entirely; psi(F) stays empty and
      // condition (1) fails below
      continue;
    }
    Rat best = vals[0];
    for (const Rat& v : vals)
      if (v < best) best = v;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (vals[i] == best) psi[fi].push_back(i);
  }

  // condition (1): intersecting facet families map to intersecting images
  std::vector<OrbitMapEntry> orbit;
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> seen_faces;
  bool ok = true;
  std::vector<std::size_t> choice;
  std::function<void(std::size_t)> walk = [&](std::size_t next) {
    if (!ok) return;
    if (next == facets.size()) {
      std::vector<std::size_t> src;
      for (std::size_t i = 0; i < q.verts.size(); ++i) {
        bool in_all = true;
        for (std::size_t fi : choice)
          if (std::find(facets[fi].verts.begin(), facets[fi].verts.end(), i) ==
              facets[fi].verts.end())
            in_all = false;
        if (in_all) src.push_back(i);
      }
      if (src.empty()) return;  // empty source face: nothing required
      std::vector<std::size_t> img;
      for (std::size_t i = 0; i < vp_m.size(); ++i) {
        bool in_all = true;
        for (std::size_t fi : choice)
          if (std::find(psi[fi].begin(), psi[fi].end(), i) == psi[fi].end()) in_all = false;
        if (in_all) img.push_back(i);
      }
      if (img.empty()) {
        ok = false;
        return;
      }
      auto it = seen_faces.find(src);
      if (it == seen_faces.end()) seen_faces.emplace(src, img);
      return;
    }
    walk(next + 1);
    choice.push_back(next);
    walk(next + 1);
    choice.pop_back();
  };
  walk(0);
  if (!ok) return std::nullopt;

  // condition (2): walls met by Q are met by Q'
  for (std::size_t j = 0; j < s.s(); ++j) {
    Rat minq = s.pairing(q.q_vertex(0), j);
    for (std::size_t i = 1; i < q.verts.size(); ++i) {
      Rat v = s.pairing(q.q_vertex(i), j);
      if (v < minq) minq = v;
    }
    if (minq != 0) continue;
    Rat minp = s.pairing(qp.q_vertex(0), j);
    for (std::size_t i = 1; i < qp.verts.size(); ++i) {
      Rat v = s.pairing(qp.q_vertex(i), j);
      if (v < minp) minp = v;
    }
    if (minp != 0) return std::nullopt;
  }

  for (auto& [src, img] : seen_faces) {
    OrbitMapEntry entry;
    for (std::size_t i : src) entry.source_face.push_back(q.verts[i].point);
    for (std::size_t i : img) entry.image_face.push_back(qp.verts[i].point);
    orbit.push_back(std::move(entry));
  }
  return orbit;
}

}  // namespace horo
