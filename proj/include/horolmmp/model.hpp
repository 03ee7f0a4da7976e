#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "horolmmp/polytope.hpp"

namespace horo {

// A color D_alpha: its pairings with the fixed weight basis, the
// anticanonical coefficient a_alpha, and the index of its fundamental weight
// in that basis.
struct Color {
  std::string name;
  IntVec coroot_pairings;  // length weight_dim
  Int a_coeff;             // a_alpha >= 1
  std::size_t weight_index;
};

struct GStableDatum {
  std::string name;
  IntVec x;  // length n, coordinates in the basis dual to the chosen M-basis
};

// Combinatorial model of the homogeneous space: weight space with a fixed
// basis, colors, the lattice M inside the weight lattice, and the G-stable
// divisor data of the ambient variety.
struct SpaceData {
  std::size_t weight_dim = 0;
  std::vector<std::string> basis_labels;
  std::vector<Color> colors;
  LatticeBasis lattice_M;
  std::vector<GStableDatum> gstable;

  std::size_t n() const { return lattice_M.rank(); }
  std::size_t r() const { return gstable.size(); }
  std::size_t s() const { return colors.size(); }

  // Pairing of each M-basis vector with alpha^vee: the A-row of a color.
  IntVec color_row(std::size_t ci) const {
    const Color& col = colors[ci];
    IntVec out(n(), Int(0));
    for (std::size_t k = 0; k < n(); ++k)
      for (std::size_t j = 0; j < weight_dim; ++j)
        out[k] += lattice_M.basis_rows[k][j] * col.coroot_pairings[j];
    return out;
  }

  Rat pairing(const RatVec& weight_point, std::size_t ci) const {
    Rat s = 0;
    for (std::size_t j = 0; j < weight_dim; ++j)
      s += weight_point[j] * Rat(colors[ci].coroot_pairings[j]);
    return s;
  }

  std::size_t color_row_index(std::size_t ci) const { return r() + ci; }

  RatVec embed(const RatVec& m_coords) const {
    RatVec out(weight_dim, Rat(0));
    for (std::size_t k = 0; k < n(); ++k)
      for (std::size_t j = 0; j < weight_dim; ++j)
        out[j] += m_coords[k] * Rat(lattice_M.basis_rows[k][j]);
    return out;
  }
};

// Coefficient vector of a B-stable Q-divisor.
struct BStableDivisor {
  RatVec gstable_coeffs;
  RatVec color_coeffs;

  static BStableDivisor zero(const SpaceData& s) {
    return {RatVec(s.r(), Rat(0)), RatVec(s.s(), Rat(0))};
  }

  bool is_zero() const { return vec_is_zero(gstable_coeffs) && vec_is_zero(color_coeffs); }

  bool operator==(const BStableDivisor& o) const {
    return gstable_coeffs == o.gstable_coeffs && color_coeffs == o.color_coeffs;
  }
};

inline BStableDivisor div_add(const BStableDivisor& a, const BStableDivisor& b) {
  return {vec_add(a.gstable_coeffs, b.gstable_coeffs), vec_add(a.color_coeffs, b.color_coeffs)};
}

inline BStableDivisor div_sub(const BStableDivisor& a, const BStableDivisor& b) {
  return {vec_sub(a.gstable_coeffs, b.gstable_coeffs), vec_sub(a.color_coeffs, b.color_coeffs)};
}

inline BStableDivisor div_scale(const Rat& c, const BStableDivisor& d) {
  return {vec_scale(c, d.gstable_coeffs), vec_scale(c, d.color_coeffs)};
}

inline void check_divisor(const SpaceData& s, const BStableDivisor& d) {
  if (d.gstable_coeffs.size() != s.r() || d.color_coeffs.size() != s.s())
    throw DimensionError("divisor coefficient count does not match space data");
}

// -K = sum X_i + sum a_alpha D_alpha.
inline BStableDivisor anticanonical(const SpaceData& s) {
  BStableDivisor d = BStableDivisor::zero(s);
  for (std::size_t i = 0; i < s.r(); ++i) d.gstable_coeffs[i] = 1;
  for (std::size_t j = 0; j < s.s(); ++j) d.color_coeffs[j] = Rat(s.colors[j].a_coeff);
  return d;
}

inline BStableDivisor canonical(const SpaceData& s) {
  return div_scale(Rat(-1), anticanonical(s));
}

inline std::vector<std::string> validate_space(const SpaceData& s) {
  std::vector<std::string> bad;
  if (s.basis_labels.size() != s.weight_dim)
    bad.push_back("basis_labels length does not equal weight_dim");
  if (s.lattice_M.ambient_dim != s.weight_dim)
    bad.push_back("lattice_M ambient dimension does not equal weight_dim");
  std::set<std::string> names;
  for (const auto& g : s.gstable) {
    if (!names.insert(g.name).second) bad.push_back("duplicate divisor name '" + g.name + "'");
    if (g.x.size() != s.n()) bad.push_back("x vector of '" + g.name + "' has wrong length");
    else if (ivec_is_zero(g.x)) bad.push_back("x vector of '" + g.name + "' is zero");
    else if (ivec_gcd(g.x) != 1) bad.push_back("x vector of '" + g.name + "' is not primitive");
  }
  std::set<IntVec> xs;
  for (const auto& g : s.gstable)
    if (g.x.size() == s.n() && !xs.insert(g.x).second)
      bad.push_back("duplicate x vector on '" + g.name + "'");
  for (std::size_t i = 0; i < s.s(); ++i) {
    const Color& c = s.colors[i];
    if (!names.insert(c.name).second) bad.push_back("duplicate divisor name '" + c.name + "'");
    if (c.coroot_pairings.size() != s.weight_dim)
      bad.push_back("coroot_pairings of '" + c.name + "' has wrong length");
    if (c.a_coeff < 1) bad.push_back("a coefficient of '" + c.name + "' must be >= 1");
    if (c.weight_index >= s.weight_dim) {
      bad.push_back("color '" + c.name + "' has no basis weight");
      continue;
    }
    if (c.coroot_pairings.size() == s.weight_dim) {
      if (c.coroot_pairings[c.weight_index] != 1)
        bad.push_back("<w_" + c.name + ", " + c.name + "^vee> must be 1");
      for (std::size_t j = 0; j < s.s(); ++j)
        if (j != i && s.colors[j].coroot_pairings.size() == s.weight_dim &&
            s.colors[j].coroot_pairings[c.weight_index] != 0)
          bad.push_back("<w_" + c.name + ", " + s.colors[j].name + "^vee> must be 0");
    }
  }
  // Basis weights that carry no color are central, so they pair to zero with
  // every coroot.
  std::set<std::size_t> color_weights;
  for (const Color& c : s.colors)
    if (c.weight_index < s.weight_dim) color_weights.insert(c.weight_index);
  for (const Color& c : s.colors) {
    if (c.coroot_pairings.size() != s.weight_dim) continue;
    for (std::size_t j = 0; j < s.weight_dim; ++j)
      if (!color_weights.count(j) && c.coroot_pairings[j] != 0)
        bad.push_back("central basis weight " + std::to_string(j) + " must pair to 0 with " +
                      c.name + "^vee");
  }
  return bad;
}

// The classification datum of a polarized variety: space, pseudo-moment
// polytope in M-coordinates, and the translation Q = v0 + Q~.
struct MomentQuadruple {
  SpaceData space;
  HPolytope q_tilde;
  RatVec translation_v;               // weight coordinates
  std::vector<VertexRecord> verts;    // vertices of q_tilde, cached

  RatVec q_vertex(std::size_t i) const {
    return vec_add(translation_v, space.embed(verts[i].point));
  }
};

namespace detail {

inline bool row_tight_on_all(const std::vector<VertexRecord>& vs,
                             const std::vector<std::size_t>& subset, std::size_t row) {
  for (std::size_t i : subset)
    if (!tight_contains(vs[i], row)) return false;
  return true;
}

}  // namespace detail

// Builds the moment quadruple of (X, D) and checks that D is ample on the
// variety the space data describes: the pseudo-moment polytope has dimension
// n, Q avoids wall containment, and every G-stable row cuts a facet that is
// not inside a wall.
inline MomentQuadruple build_quadruple(const SpaceData& s, const BStableDivisor& d) {
  check_divisor(s, d);
  const std::size_t n = s.n();
  std::vector<RatVec> rows;
  RatVec rhs;
  for (std::size_t i = 0; i < s.r(); ++i) {
    rows.push_back(rat_vec(s.gstable[i].x));
    rhs.push_back(-d.gstable_coeffs[i]);
  }
  for (std::size_t j = 0; j < s.s(); ++j) {
    rows.push_back(rat_vec(s.color_row(j)));
    rhs.push_back(-d.color_coeffs[j]);
  }
  HPolytope p(RatMat::from_rows(rows, n), rhs);

  auto enum_res = enumerate_vertices(p);
  if (enum_res.status == PolytopeStatus::unbounded)
    throw DomainError("pseudo-moment polytope is unbounded");
  auto& vs = enum_res.verts;
  if (dimension_of(vs) != static_cast<int>(n))
    throw DomainError("empty or lower-dimensional polytope");

  RatVec v0(s.weight_dim, Rat(0));
  for (std::size_t j = 0; j < s.s(); ++j) v0[s.colors[j].weight_index] = d.color_coeffs[j];

  std::vector<std::size_t> all(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) all[i] = i;
  for (std::size_t j = 0; j < s.s(); ++j)
    if (detail::row_tight_on_all(vs, all, s.color_row_index(j)))
      throw DomainError("Q contained in wall W_" + s.colors[j].name);

  std::vector<std::vector<std::size_t>> facet_verts(s.r());
  for (std::size_t k = 0; k < s.r(); ++k) {
    std::vector<RatVec> pts;
    for (std::size_t i = 0; i < vs.size(); ++i)
      if (tight_contains(vs[i], k)) {
        facet_verts[k].push_back(i);
        pts.push_back(vs[i].point);
      }
    if (pts.empty() || affine_dim(pts) != static_cast<int>(n) - 1)
      throw DomainError("gstable row " + s.gstable[k].name + " not a facet");
    for (std::size_t j = 0; j < s.s(); ++j)
      if (detail::row_tight_on_all(vs, facet_verts[k], s.color_row_index(j)))
        throw DomainError("facet of gstable row " + s.gstable[k].name + " contained in wall W_" +
                          s.colors[j].name);
  }
  for (std::size_t k1 = 0; k1 < s.r(); ++k1)
    for (std::size_t k2 = k1 + 1; k2 < s.r(); ++k2)
      if (facet_verts[k1] == facet_verts[k2])
        throw DomainError("duplicate gstable facets: " + s.gstable[k1].name + ", " +
                          s.gstable[k2].name);

  return MomentQuadruple{s, std::move(p), std::move(v0), std::move(vs)};
}

// Reads the divisor back off the quadruple: color coefficients from the
// translation vector, d_i = -<v_i, x_i> for any v_i on the facet of row i.
inline BStableDivisor recover_divisor(const MomentQuadruple& q) {
  const SpaceData& s = q.space;
  BStableDivisor d = BStableDivisor::zero(s);
  int dim = dimension_of(q.verts);
  for (std::size_t k = 0; k < s.r(); ++k) {
    std::vector<RatVec> pts;
    for (const auto& v : q.verts)
      if (tight_contains(v, k)) pts.push_back(v.point);
    if (pts.empty() || affine_dim(pts) != dim - 1)
      throw DomainError("cannot recover divisor: row " + s.gstable[k].name +
                        " is not facet-defining");
    d.gstable_coeffs[k] = -q.q_tilde.rhs[k];
  }
  for (std::size_t j = 0; j < s.s(); ++j)
    d.color_coeffs[j] = q.translation_v[s.colors[j].weight_index];
  return d;
}

enum class SingularityClass { klt, lc_not_klt, not_lc };

inline const char* to_string(SingularityClass c) {
  switch (c) {
    case SingularityClass::klt: return "klt";
    case SingularityClass::lc_not_klt: return "lc_not_klt";
    default: return "not_lc";
  }
}

// Coefficient test: klt iff every coefficient < 1, lc iff every <= 1. The
// pair condition (K + Delta Q-Cartier) is certified separately.
inline SingularityClass classify_singularities(const BStableDivisor& delta) {
  bool klt = true, lc = true;
  auto scan = [&](const RatVec& v) {
    for (const Rat& c : v) {
      if (c >= 1) klt = false;
      if (c > 1) lc = false;
    }
  };
  scan(delta.gstable_coeffs);
  scan(delta.color_coeffs);
  if (klt) return SingularityClass::klt;
  return lc ? SingularityClass::lc_not_klt : SingularityClass::not_lc;
}

// r' + s - n with r' the number of facet-defining gstable rows.
inline int class_rank(const MomentQuadruple& q) {
  int dim = dimension_of(q.verts);
  int rprime = 0;
  for (std::size_t k = 0; k < q.space.r(); ++k) {
    std::vector<RatVec> pts;
    for (const auto& v : q.verts)
      if (tight_contains(v, k)) pts.push_back(v.point);
    if (!pts.empty() && affine_dim(pts) == dim - 1) ++rprime;
  }
  return rprime + static_cast<int>(q.space.s()) - static_cast<int>(q.space.n());
}

// Rational curve classes generating the effective cone: one per edge of Q and
// one per (color, vertex) pair with strictly positive pairing.
struct CurveClass {
  enum class Kind { edge, color_vertex } kind;
  // edge: both endpoints; color_vertex: v1 only
  VertexRecord v1, v2;
  std::size_t color = 0;  // index into space.colors for color_vertex

  static CurveClass edge_curve(VertexRecord a, VertexRecord b) {
    return {Kind::edge, std::move(a), std::move(b), 0};
  }
  static CurveClass color_vertex_curve(std::size_t color, VertexRecord v) {
    return {Kind::color_vertex, std::move(v), {}, color};
  }
};

// Curves with their intersection against the defining ample divisor:
// integral edge lengths and color-vertex pairings. Deterministic order.
inline std::vector<std::pair<CurveClass, Rat>> curves(const MomentQuadruple& q) {
  const SpaceData& s = q.space;
  std::vector<std::pair<CurveClass, Rat>> out;
  LatticeBasis std_lattice = LatticeBasis::standard(s.n());
  for (auto& [a, b] : edges_of(q.verts)) {
    Rat len = integral_length(vec_sub(b.point, a.point), std_lattice);
    out.emplace_back(CurveClass::edge_curve(a, b), len);
  }
  for (std::size_t j = 0; j < s.s(); ++j) {
    for (const auto& v : q.verts) {
      RatVec w = vec_add(q.translation_v, s.embed(v.point));
      Rat pr = s.pairing(w, j);
      if (pr > 0) out.emplace_back(CurveClass::color_vertex_curve(j, v), pr);
    }
  }
  return out;
}

// Least positive integer m with floor(-K - m D') <= 0, and that boundary.
// D' must be strictly effective.
inline std::pair<Int, BStableDivisor> klt_boundary(const SpaceData& s, const BStableDivisor& dp) {
  check_divisor(s, dp);
  for (const Rat& c : dp.gstable_coeffs)
    if (c <= 0) throw DomainError("klt_boundary: divisor not strictly effective");
  for (const Rat& c : dp.color_coeffs)
    if (c <= 0) throw DomainError("klt_boundary: divisor not strictly effective");
  // Gstable coefficients 1 - m c are < 1 for every m >= 1; only colors bind.
  Int m = 1;
  BStableDivisor mk = anticanonical(s);
  for (std::size_t j = 0; j < s.s(); ++j) {
    // need a_alpha - m c_alpha < 1, i.e. m > (a_alpha - 1) / c_alpha
    Rat bound = (Rat(s.colors[j].a_coeff) - 1) / dp.color_coeffs[j];
    Int least = rat_floor(bound) + 1;
    if (least > m) m = least;
  }
  BStableDivisor delta = div_sub(mk, div_scale(Rat(m), dp));
  return {m, delta};
}

}  // namespace horo
