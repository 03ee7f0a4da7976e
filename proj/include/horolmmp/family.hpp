#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "horolmmp/model.hpp"

namespace horo {

// One-parameter family of pseudo-moment polytopes {x : A x >= B~ + eps C~}
// translated along v^eps = v0 + eps w. Rows: gstable first, then colors.
struct Family {
  SpaceData space;
  RatMat A;          // (r+s) x n
  RatVec B_tilde;    // r+s
  RatVec C_tilde;    // r+s
  RatVec v0, w;      // weight coordinates
  BStableDivisor D;  // the ample divisor the family starts from
};

// Family of (X, D + eps Dperturb). For the log MMP, Dperturb = K + Delta.
inline Family build_family(const SpaceData& s, const BStableDivisor& d,
                           const BStableDivisor& dperturb) {
  check_divisor(s, dperturb);
  MomentQuadruple q0 = build_quadruple(s, d);  // validates ampleness
  Family f;
  f.space = s;
  f.A = q0.q_tilde.rows;
  f.B_tilde = q0.q_tilde.rhs;
  f.C_tilde.resize(s.r() + s.s());
  for (std::size_t i = 0; i < s.r(); ++i) f.C_tilde[i] = -dperturb.gstable_coeffs[i];
  for (std::size_t j = 0; j < s.s(); ++j) f.C_tilde[s.r() + j] = -dperturb.color_coeffs[j];
  f.v0 = q0.translation_v;
  f.w.assign(s.weight_dim, Rat(0));
  for (std::size_t j = 0; j < s.s(); ++j)
    f.w[s.colors[j].weight_index] = dperturb.color_coeffs[j];
  f.D = d;
  return f;
}

inline RatVec v_eps(const Family& f, const Rat& eps) {
  return vec_add(f.v0, vec_scale(eps, f.w));
}

// Exact instantiation of the family at one parameter value, with the vertex
// enumeration attached.
struct FamilySlice {
  Rat eps;
  HPolytope q_tilde;
  RatVec veps;
  PolytopeStatus status = PolytopeStatus::ok;
  std::vector<VertexRecord> verts;
  int dim = -1;
  std::vector<std::size_t> facets;      // facet-defining rows
  std::vector<std::size_t> wall_touch;  // colors whose row is tight somewhere
};

inline FamilySlice polytope_at(const Family& f, const Rat& eps) {
  FamilySlice s;
  s.eps = eps;
  RatVec rhs(f.B_tilde.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = f.B_tilde[i] + eps * f.C_tilde[i];
  s.q_tilde = HPolytope(f.A, rhs);
  s.veps = v_eps(f, eps);
  auto res = enumerate_vertices(s.q_tilde);
  s.status = res.status;
  if (res.status == PolytopeStatus::unbounded)
    throw DomainError("family slice unbounded at eps = " + rat_str(eps));
  s.verts = std::move(res.verts);
  s.dim = dimension_of(s.verts);
  s.facets = facet_rows_of(s.q_tilde, s.verts);
  for (std::size_t j = 0; j < f.space.s(); ++j) {
    std::size_t row = f.space.color_row_index(j);
    for (const auto& v : s.verts)
      if (tight_contains(v, row)) {
        s.wall_touch.push_back(j);
        break;
      }
  }
  return s;
}

inline RatVec q_vertex_weight(const Family& f, const FamilySlice& s, std::size_t i) {
  return vec_add(s.veps, f.space.embed(s.verts[i].point));
}

// Parametric vertex v_J(eps) = base + eps * slope, valid on [lo, hi].
struct VertexPath {
  std::vector<std::size_t> J;
  RatVec base, slope;
  Rat lo;
  std::optional<Rat> hi;  // empty = +infinity
};

inline std::vector<VertexPath> vertex_paths(const Family& f) {
  const std::size_t m = f.A.rows, n = f.A.cols;
  std::vector<VertexPath> out;
  detail::for_each_subset(m, n, [&](const std::vector<std::size_t>& idx) {
    RatMat sub(n, n);
    RatVec b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) sub(i, j) = f.A(idx[i], j);
      b[i] = f.B_tilde[idx[i]];
      c[i] = f.C_tilde[idx[i]];
    }
    auto base = solve_square(sub, b);
    if (!base) return;
    auto slope = solve_square(sub, c);
    VertexPath p;
    p.J = idx;
    p.base = *base;
    p.slope = *slope;
    p.lo = 0;
    for (std::size_t i = 0; i < m; ++i) {
      RatVec row = f.A.row(i);
      Rat pc = dot(row, p.base) - f.B_tilde[i];
      Rat qc = dot(row, p.slope) - f.C_tilde[i];
      if (qc == 0) {
        if (pc < 0) return;  // this row is violated for every eps
      } else {
        Rat bound = -pc / qc;
        if (qc > 0) {
          if (bound > p.lo) p.lo = bound;
        } else {
          if (!p.hi || bound < *p.hi) p.hi = bound;
        }
      }
    }
    if (p.hi && *p.hi < p.lo) return;
    out.push_back(std::move(p));
  });
  return out;
}

// Sorted distinct finite interval endpoints of all vertex paths, plus 0.
inline std::vector<Rat> candidate_breakpoints(const Family& f) {
  std::vector<Rat> cs{Rat(0)};
  for (const auto& p : vertex_paths(f)) {
    cs.push_back(p.lo);
    if (p.hi) cs.push_back(*p.hi);
  }
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  return cs;
}

struct GHResult {
  bool ok = false;
  std::string reason;
};

// Q^eps is a G/H-polytope: nonempty, dimension n, contained in no wall.
inline GHResult gh_check(const Family& f, const FamilySlice& s) {
  if (s.verts.empty()) return {false, "empty"};
  if (s.dim != static_cast<int>(f.space.n()))
    return {false, "dimension " + std::to_string(s.dim) + " < " +
                       std::to_string(f.space.n())};
  for (std::size_t j = 0; j < f.space.s(); ++j) {
    std::size_t row = f.space.color_row_index(j);
    bool all = true;
    for (const auto& v : s.verts)
      if (!tight_contains(v, row)) {
        all = false;
        break;
      }
    if (all) return {false, "contained in wall W_" + f.space.colors[j].name};
  }
  return {true, ""};
}

inline GHResult is_gh_polytope(const Family& f, const Rat& eps) {
  return gh_check(f, polytope_at(f, eps));
}

struct Signature {
  int dim = -1;
  std::vector<std::size_t> facets;
  std::vector<std::size_t> wall_touch;
  bool operator==(const Signature& o) const {
    return dim == o.dim && facets == o.facets && wall_touch == o.wall_touch;
  }
};

inline Signature signature_of(const FamilySlice& s) {
  return Signature{s.dim, s.facets, s.wall_touch};
}

namespace detail {

using Mask = std::vector<std::uint64_t>;

inline Mask full_mask(std::size_t bits) {
  Mask m((bits + 63) / 64, ~std::uint64_t{0});
  if (bits % 64) m.back() = (std::uint64_t{1} << (bits % 64)) - 1;
  if (bits == 0) m.assign(1, 0);
  return m;
}

inline Mask row_mask(const std::vector<VertexRecord>& vs, std::size_t row) {
  Mask m((vs.size() + 63) / 64, 0);
  if (vs.empty()) m.assign(1, 0);
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (tight_contains(vs[i], row)) m[i / 64] |= std::uint64_t{1} << (i % 64);
  return m;
}

inline Mask mask_and(const Mask& a, const Mask& b) {
  Mask out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}

inline int mask_dim(const std::vector<VertexRecord>& vs, const Mask& m,
                    std::map<Mask, int>& memo) {
  auto it = memo.find(m);
  if (it != memo.end()) return it->second;
  std::vector<RatVec> pts;
  for (std::size_t i = 0; i < vs.size(); ++i)
    if (m[i / 64] >> (i % 64) & 1) pts.push_back(vs[i].point);
  int d = affine_dim(pts);
  memo.emplace(m, d);
  return d;
}

// Depth-first walk over all subsets of F comparing face dimensions.
inline bool subset_dims_agree(const std::vector<std::size_t>& f_rows, std::size_t k,
                              const Mask& m1, const Mask& m2,
                              const std::vector<Mask>& rows1, const std::vector<Mask>& rows2,
                              const std::vector<VertexRecord>& vs1,
                              const std::vector<VertexRecord>& vs2,
                              std::map<Mask, int>& memo1, std::map<Mask, int>& memo2) {
  if (k == f_rows.size())
    return mask_dim(vs1, m1, memo1) == mask_dim(vs2, m2, memo2);
  if (!subset_dims_agree(f_rows, k + 1, m1, m2, rows1, rows2, vs1, vs2, memo1, memo2))
    return false;
  return subset_dims_agree(f_rows, k + 1, mask_and(m1, rows1[k]), mask_and(m2, rows2[k]),
                           rows1, rows2, vs1, vs2, memo1, memo2);
}

}  // namespace detail

// Decision procedure for equivalence of G/H-polytopes inside one family:
// F = common facet rows must cut out both slices exactly, all subsets of F
// must cut faces of equal dimension on both sides, and the wall-touch sets
// must agree.
inline bool equivalent_slices(const Family& f, const FamilySlice& s1, const FamilySlice& s2,
                              std::vector<std::size_t>* witness = nullptr) {
  GHResult g1 = gh_check(f, s1), g2 = gh_check(f, s2);
  if (!g1.ok || !g2.ok)
    throw DomainError("is_equivalent: not a G/H-polytope (" + (g1.ok ? g2.reason : g1.reason) +
                      ")");
  if (s1.wall_touch != s2.wall_touch) return false;

  std::vector<std::size_t> F;
  std::set_intersection(s1.facets.begin(), s1.facets.end(), s2.facets.begin(), s2.facets.end(),
                        std::back_inserter(F));
  if (F.size() > 24) throw InternalError("equivalence witness too large");

  // (a) rows F alone cut out both polytopes exactly
  for (const FamilySlice* s : {&s1, &s2}) {
    std::vector<RatVec> rows;
    RatVec rhs;
    for (std::size_t r : F) {
      rows.push_back(s->q_tilde.rows.row(r));
      rhs.push_back(s->q_tilde.rhs[r]);
    }
    HPolytope sub(RatMat::from_rows(rows, s->q_tilde.n()), rhs);
    auto res = enumerate_vertices(sub);
    if (res.status != PolytopeStatus::ok) return false;
    if (vertex_points(res.verts) != vertex_points(s->verts)) return false;
  }

  // (b) all subsets of F cut faces of the same dimension
  std::vector<detail::Mask> rows1, rows2;
  for (std::size_t r : F) {
    rows1.push_back(detail::row_mask(s1.verts, r));
    rows2.push_back(detail::row_mask(s2.verts, r));
  }
  std::map<detail::Mask, int> memo1, memo2;
  bool ok = detail::subset_dims_agree(F, 0, detail::full_mask(s1.verts.size()),
                                      detail::full_mask(s2.verts.size()), rows1, rows2, s1.verts,
                                      s2.verts, memo1, memo2);
  if (ok && witness) *witness = F;
  return ok;
}

inline bool is_equivalent(const Family& f, const Rat& e1, const Rat& e2) {
  FamilySlice s1 = polytope_at(f, e1), s2 = polytope_at(f, e2);
  return equivalent_slices(f, s1, s2);
}

// Half-open or singleton parameter range of one equivalence class.
struct ClassInterval {
  Rat lo;
  std::optional<Rat> hi;  // empty = +infinity
  bool lo_closed = true, hi_closed = false;
  Rat rep;  // interior representative (or the singleton value)
  Signature sig;

  bool singleton() const { return hi && lo == *hi && lo_closed && hi_closed; }
};

struct EpsilonClassification {
  std::vector<Rat> candidates;   // all vertex-path endpoints
  std::vector<Rat> breakpoints;  // class-changing parameters, plus eps_max
  std::optional<Rat> eps_max;    // empty = +infinity
  Rat scan_window = 0;           // largest parameter probed for stabilization
  std::vector<ClassInterval> intervals;
};

namespace detail {

struct Piece {
  bool is_candidate;
  Rat lo;                 // candidate value, or open-interval low end
  std::optional<Rat> hi;  // open-interval high end (empty = +infinity)
  Rat rep;
};

inline std::vector<Piece> make_pieces(const std::vector<Rat>& cands, const Rat& tail_probe) {
  std::vector<Piece> ps;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    ps.push_back({true, cands[i], cands[i], cands[i]});
    if (i + 1 < cands.size())
      ps.push_back({false, cands[i], cands[i + 1], (cands[i] + cands[i + 1]) / 2});
    else
      ps.push_back({false, cands[i], std::nullopt, tail_probe});
  }
  return ps;
}

}  // namespace detail

// Classifies the whole family: finds eps_max as the first parameter where the
// G/H-polytope predicate fails, then groups [0, eps_max) into maximal
// equivalence classes separated by breakpoints.
inline EpsilonClassification breakpoints(const Family& f,
                                         std::optional<Rat> max_epsilon = std::nullopt) {
  EpsilonClassification out;
  out.candidates = candidate_breakpoints(f);
  const Rat last = out.candidates.back();
  Rat probe = last * 4 + 1;
  if (max_epsilon && *max_epsilon > probe) probe = *max_epsilon;
  if (probe <= last) probe = last + 1;
  out.scan_window = probe;

  auto pieces = detail::make_pieces(out.candidates, probe);

  std::map<Rat, FamilySlice> cache;
  auto slice_at = [&](const Rat& e) -> const FamilySlice& {
    auto it = cache.find(e);
    if (it == cache.end()) it = cache.emplace(e, polytope_at(f, e)).first;
    return it->second;
  };

  // Scan for eps_max.
  std::size_t stop_piece = pieces.size();
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    GHResult g = gh_check(f, slice_at(pieces[i].rep));
    if (!g.ok) {
      if (!pieces[i].is_candidate)
        throw InternalError("G/H predicate fails strictly inside an open piece near eps = " +
                            rat_str(pieces[i].rep) + " (" + g.reason + ")");
      out.eps_max = pieces[i].lo;
      stop_piece = i;
      break;
    }
  }

  // Group [0, eps_max) into classes.
  auto equiv = [&](const Rat& a, const Rat& b) {
    return equivalent_slices(f, slice_at(a), slice_at(b));
  };

  ClassInterval cur;
  cur.lo = 0;
  cur.lo_closed = true;
  bool have_cur = false;
  auto flush = [&](const Rat& hi, bool hi_closed) {
    cur.hi = hi;
    cur.hi_closed = hi_closed;
    cur.sig = signature_of(slice_at(cur.rep));
    out.intervals.push_back(cur);
  };

  for (std::size_t i = 0; i < stop_piece; ++i) {
    const auto& pc = pieces[i];
    if (!pc.is_candidate) {
      // interior sanity: the class is constant on the open piece
      Rat second = pc.hi ? pc.lo + (*pc.hi - pc.lo) * Rat(2, 3) : pc.rep + 1;
      if (second != pc.rep && !equiv(pc.rep, second))
        throw InternalError("class not constant on open interval near eps = " + rat_str(pc.rep));
      if (!have_cur) {
        cur.rep = pc.rep;
        have_cur = true;
      } else if (!equiv(cur.rep, pc.rep)) {
        throw InternalError("class changed without a candidate breakpoint near eps = " +
                            rat_str(pc.rep));
      }
      continue;
    }
    // candidate piece
    if (pc.lo == 0) {
      if (!have_cur) {
        cur.rep = 0;  // provisional; replaced by the first open piece
      }
      continue;
    }
    const Rat c = pc.lo;
    Rat right_rep = (i + 1 < pieces.size()) ? pieces[i + 1].rep : c + 1;
    if (i + 1 >= stop_piece) {
      // the next piece is past eps_max; c is the last candidate before it,
      // which can only happen when c == eps_max (handled above)
      throw InternalError("breakpoint scan walked past eps_max");
    }
    bool eq_left = equiv(cur.rep, c);
    bool eq_right = equiv(c, right_rep);
    if (eq_left && eq_right) continue;  // not a real breakpoint
    if (eq_left && !eq_right)
      throw DomainError("anomaly: breakpoint polytope at eps = " + rat_str(c) +
                        " is equivalent to its left class only");
    out.breakpoints.push_back(c);
    if (eq_right) {
      flush(c, false);
      cur = ClassInterval{};
      cur.lo = c;
      cur.lo_closed = true;
      cur.rep = right_rep;
      have_cur = true;
    } else {
      flush(c, false);
      ClassInterval y;
      y.lo = c;
      y.hi = c;
      y.lo_closed = y.hi_closed = true;
      y.rep = c;
      y.sig = signature_of(slice_at(c));
      out.intervals.push_back(y);
      cur = ClassInterval{};
      cur.lo = c;
      cur.lo_closed = false;
      cur.rep = right_rep;
      have_cur = true;
    }
  }

  if (out.eps_max) {
    if (*out.eps_max == 0) return out;  // degenerate: nothing is a G/H-polytope
    flush(*out.eps_max, false);
    out.breakpoints.push_back(*out.eps_max);
  } else {
    cur.hi = std::nullopt;
    cur.hi_closed = false;
    cur.sig = signature_of(slice_at(cur.rep));
    out.intervals.push_back(cur);
  }
  return out;
}

// Parameter range on which one row stays facet-defining, within
// [0, eps_max] (or [0, infinity) when the family stabilizes).
struct EpsInterval {
  bool empty = true;
  Rat lo;
  std::optional<Rat> hi;
  bool lo_closed = true, hi_closed = true;
};

// Facet intervals for every row in one sweep over the pieces.
inline std::vector<EpsInterval> facet_intervals(const Family& f,
                                                const EpsilonClassification& cls) {
  std::vector<Rat> cands = cls.candidates;
  if (cls.eps_max) {
    while (!cands.empty() && cands.back() > *cls.eps_max) cands.pop_back();
    if (cands.empty() || cands.back() != *cls.eps_max) cands.push_back(*cls.eps_max);
  }
  auto pieces = detail::make_pieces(cands, cands.back() + 1);
  if (cls.eps_max && !pieces.empty()) pieces.pop_back();  // drop the piece past eps_max

  const std::size_t m = f.A.rows;
  std::vector<EpsInterval> out(m);
  std::vector<bool> prev(m, false), done(m, false);
  for (const auto& pc : pieces) {
    auto slice = polytope_at(f, pc.rep);
    for (std::size_t row = 0; row < m; ++row) {
      bool is_facet = std::binary_search(slice.facets.begin(), slice.facets.end(), row);
      if (is_facet) {
        if (done[row])
          throw InternalError("facet interval of row " + std::to_string(row) + " is not convex");
        if (!prev[row]) {
          out[row].empty = false;
          out[row].lo = pc.lo;
          out[row].lo_closed = pc.is_candidate;
        }
        out[row].hi = pc.is_candidate ? std::optional<Rat>(pc.lo) : pc.hi;
        out[row].hi_closed = pc.is_candidate;
        prev[row] = true;
      } else if (prev[row]) {
        done[row] = true;
        prev[row] = false;
      }
    }
  }
  return out;
}

inline EpsInterval facet_interval(const Family& f, std::size_t row,
                                  const EpsilonClassification& cls) {
  return facet_intervals(f, cls)[row];
}

inline EpsInterval facet_interval(const Family& f, std::size_t row) {
  return facet_interval(f, row, breakpoints(f));
}

namespace detail {

// Equivalence between eps = 0 and one small parameter of the family; the
// probe is half the first positive candidate breakpoint (1 when none).
inline bool small_perturbation_equivalent(const Family& f) {
  Rat probe = 1;
  for (const Rat& c : candidate_breakpoints(f))
    if (c > 0) {
      probe = c / 2;
      break;
    }
  FamilySlice s0 = polytope_at(f, Rat(0));
  FamilySlice s1 = polytope_at(f, probe);
  if (!gh_check(f, s1).ok) return false;
  return equivalent_slices(f, s0, s1);
}

}  // namespace detail

// D' is Q-Cartier iff small perturbations of D along D' stay equivalent to
// the moment polytope of D. Both signs are tested and must agree.
inline bool is_q_cartier(const SpaceData& s, const BStableDivisor& d, const BStableDivisor& dp) {
  bool plus = detail::small_perturbation_equivalent(build_family(s, d, dp));
  bool minus =
      detail::small_perturbation_equivalent(build_family(s, d, div_scale(Rat(-1), dp)));
  if (plus != minus)
    throw InternalError("Q-Cartier perturbation test disagrees between D' and -D'");
  return plus;
}

// Every prime B-stable divisor is Q-Cartier.
inline bool is_q_factorial(const SpaceData& s, const BStableDivisor& d) {
  for (std::size_t i = 0; i < s.r(); ++i) {
    BStableDivisor unit = BStableDivisor::zero(s);
    unit.gstable_coeffs[i] = 1;
    if (!is_q_cartier(s, d, unit)) return false;
  }
  for (std::size_t j = 0; j < s.s(); ++j) {
    BStableDivisor unit = BStableDivisor::zero(s);
    unit.color_coeffs[j] = 1;
    if (!is_q_cartier(s, d, unit)) return false;
  }
  return true;
}

struct GeneralPosition {
  bool ok = true;
  std::vector<std::size_t> violating_rows;  // first (n+1)-subset with A_I x = B_I solvable
};

// B~ is in general position when no point satisfies n+1 of the defining
// equalities simultaneously.
inline GeneralPosition general_position(const Family& f) {
  const std::size_t m = f.A.rows, n = f.A.cols;
  GeneralPosition out;
  if (m < n + 1) return out;
  detail::for_each_subset(m, n + 1, [&](const std::vector<std::size_t>& idx) {
    if (!out.ok) return;
    RatMat sub(n + 1, n);
    RatVec b(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) sub(i, j) = f.A(idx[i], j);
      b[i] = f.B_tilde[idx[i]];
    }
    if (solve_general(sub, b)) {
      out.ok = false;
      out.violating_rows = idx;
    }
  });
  return out;
}

namespace detail {

// Face of a slice cut by tight rows T: vertices whose tight set contains T.
inline std::vector<std::size_t> face_vertices(const FamilySlice& s,
                                              const std::vector<std::size_t>& t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.verts.size(); ++i) {
    bool all = true;
    for (std::size_t r : t)
      if (!tight_contains(s.verts[i], r)) {
        all = false;
        break;
      }
    if (all) out.push_back(i);
  }
  return out;
}

inline Rat curve_value_on_slice(const Family& f, const FamilySlice& s, const CurveClass& c,
                                const std::vector<std::size_t>& F) {
  auto f_tight = [&](const VertexRecord& v) {
    std::vector<std::size_t> t;
    for (std::size_t r : F)
      if (tight_contains(v, r)) t.push_back(r);
    return t;
  };
  if (c.kind == CurveClass::Kind::edge) {
    std::vector<std::size_t> t1 = f_tight(c.v1), t2 = f_tight(c.v2), t;
    std::set_intersection(t1.begin(), t1.end(), t2.begin(), t2.end(), std::back_inserter(t));
    auto face = face_vertices(s, t);
    if (face.size() != 2)
      throw InternalError("edge does not transport to an edge across the perturbation");
    RatVec dir = vec_sub(s.verts[face[1]].point, s.verts[face[0]].point);
    return integral_length(dir, LatticeBasis::standard(f.space.n()));
  }
  auto face = face_vertices(s, f_tight(c.v1));
  if (face.size() != 1)
    throw InternalError("vertex does not transport to a vertex across the perturbation");
  RatVec w = q_vertex_weight(f, s, face[0]);
  return f.space.pairing(w, c.color);
}

}  // namespace detail

// Exact intersection numbers D'.C for a Q-Cartier divisor D', computed as
// slopes in eps of the curves' values along the perturbation family
// D + eps D'. Non-equivalence of the perturbed polytope certifies that D' is
// not Q-Cartier. Each slope is evaluated at two parameters and must agree.
inline std::vector<Rat> intersect_divisor_many(const MomentQuadruple& q,
                                               const BStableDivisor& dp,
                                               const std::vector<CurveClass>& cs) {
  BStableDivisor d = recover_divisor(q);
  Family f = build_family(q.space, d, dp);
  Rat e1 = 1;
  for (const Rat& cand : candidate_breakpoints(f))
    if (cand > 0) {
      e1 = cand / 2;
      break;
    }
  FamilySlice s0 = polytope_at(f, Rat(0));
  std::vector<Rat> slopes(cs.size());
  bool first = true;
  for (const Rat& e : {e1, Rat(e1 / 2)}) {
    FamilySlice se = polytope_at(f, e);
    std::vector<std::size_t> F;
    if (!gh_check(f, se).ok || !equivalent_slices(f, s0, se, &F))
      throw DomainError("intersect_divisor: divisor is not Q-Cartier");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      Rat v0 = detail::curve_value_on_slice(f, s0, cs[i], F);
      Rat ve = detail::curve_value_on_slice(f, se, cs[i], F);
      Rat sl = (ve - v0) / e;
      if (first) {
        slopes[i] = sl;
      } else if (sl != slopes[i]) {
        throw InternalError("intersection slope is not affine near eps = 0");
      }
    }
    first = false;
  }
  return slopes;
}

inline Rat intersect_divisor(const MomentQuadruple& q, const BStableDivisor& dp,
                             const CurveClass& c) {
  return intersect_divisor_many(q, dp, {c})[0];
}

}  // namespace horo
