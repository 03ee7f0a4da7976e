#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iterator>
#include <map>
#include <utility>
#include <vector>

#include "horolmmp/lattice.hpp"
#include "horolmmp/linalg.hpp"

namespace horo {

// H-representation polytope {x : rows * x >= rhs}. Rows are never removed or
// reordered; row indices are stable identifiers.
struct HPolytope {
  RatMat rows;  // m x n, inward normals
  RatVec rhs;   // m

  HPolytope() = default;
  HPolytope(RatMat r, RatVec b) : rows(std::move(r)), rhs(std::move(b)) {
    if (rows.rows != rhs.size()) throw DimensionError("HPolytope: rhs size mismatch");
  }

  std::size_t m() const { return rows.rows; }
  std::size_t n() const { return rows.cols; }

  bool contains(const RatVec& x) const {
    RatVec v = mat_vec(rows, x);
    for (std::size_t i = 0; i < m(); ++i)
      if (v[i] < rhs[i]) return false;
    return true;
  }
};

struct VertexRecord {
  RatVec point;
  std::vector<std::size_t> tight_rows;  // sorted; all rows with zero slack
};

enum class PolytopeStatus { ok, empty, unbounded };

struct VertexEnumResult {
  PolytopeStatus status = PolytopeStatus::ok;
  std::vector<VertexRecord> verts;
};

namespace detail {

inline void for_each_subset(std::size_t m, std::size_t k,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

using Constraint = std::pair<RatVec, Rat>;  // a, c meaning a*x >= c

// Scale each constraint to a primitive integer normal and drop those
// dominated by another with the same normal.
inline void normalize_constraints(std::vector<Constraint>& cs) {
  std::map<RatVec, Rat> best;
  for (auto& [a, c] : cs) {
    Int denom = 1;
    for (const Rat& v : a) denom = denom / int_gcd(denom, rat_den(v)) * rat_den(v);
    IntVec w(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = rat_num(a[i]) * (denom / rat_den(a[i]));
    Int g = ivec_gcd(w);
    Rat scale = g == 0 ? Rat(1) : Rat(denom, g);
    RatVec key(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) key[i] = a[i] * scale;
    Rat val = c * scale;
    auto it = best.find(key);
    if (it == best.end() || it->second < val) best[key] = val;
  }
  cs.clear();
  for (auto& [k, v] : best) cs.emplace_back(k, v);
}

// One round of Fourier-Motzkin, eliminating variable `var`.
inline void fm_eliminate_var(std::vector<Constraint>& cons, std::size_t var) {
  normalize_constraints(cons);
  std::vector<Constraint> pos, neg, zero;
  for (auto& c : cons) {
    if (c.first[var] > 0) pos.push_back(c);
    else if (c.first[var] < 0) neg.push_back(c);
    else zero.push_back(c);
  }
  std::vector<Constraint> next = std::move(zero);
  for (const auto& [pa, pc] : pos)
    for (const auto& [na, nc] : neg) {
      Rat cp = -na[var], cn = pa[var];  // both positive
      RatVec a(pa.size());
      for (std::size_t j = 0; j < pa.size(); ++j) a[j] = cp * pa[j] + cn * na[j];
      next.emplace_back(std::move(a), cp * pc + cn * nc);
    }
  cons = std::move(next);
}

inline bool fm_feasible(std::vector<Constraint> cons, std::size_t n) {
  for (std::size_t var = n; var-- > 0;) fm_eliminate_var(cons, var);
  for (const auto& [a, c] : cons)
    if (c > 0) return false;
  return true;
}

inline bool fm_feasible(const HPolytope& p) {
  std::vector<Constraint> cons;
  for (std::size_t i = 0; i < p.m(); ++i) cons.emplace_back(p.rows.row(i), p.rhs[i]);
  return fm_feasible(std::move(cons), p.n());
}

}  // namespace detail

// Exact vertex enumeration by n-subset pivoting; never throws.
inline VertexEnumResult enumerate_vertices(const HPolytope& p) {
  const std::size_t m = p.m(), n = p.n();
  VertexEnumResult res;

  if (n == 0) {
    for (std::size_t i = 0; i < m; ++i)
      if (p.rhs[i] > 0) {
        res.status = PolytopeStatus::empty;
        return res;
      }
    VertexRecord v;
    for (std::size_t i = 0; i < m; ++i)
      if (p.rhs[i] == 0) v.tight_rows.push_back(i);
    res.verts.push_back(std::move(v));
    return res;
  }

  std::map<RatVec, std::vector<std::size_t>> found;
  detail::for_each_subset(m, n, [&](const std::vector<std::size_t>& idx) {
    RatMat sub(n, n);
    RatVec b(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) sub(i, j) = p.rows(idx[i], j);
      b[i] = p.rhs[idx[i]];
    }
    auto x = solve_square(sub, b);
    if (!x || found.count(*x)) return;
    RatVec vals = mat_vec(p.rows, *x);
    std::vector<std::size_t> tight;
    for (std::size_t i = 0; i < m; ++i) {
      if (vals[i] < p.rhs[i]) return;
      if (vals[i] == p.rhs[i]) tight.push_back(i);
    }
    found.emplace(*x, std::move(tight));
  });

  if (found.empty()) {
    res.status = detail::fm_feasible(p) ? PolytopeStatus::unbounded : PolytopeStatus::empty;
    return res;
  }

  // Nonempty with a vertex: the recession cone {rows x >= 0} is pointed, so
  // unboundedness shows up as an extreme ray tight on n-1 independent rows.
  bool unbounded = false;
  detail::for_each_subset(m, n - 1, [&](const std::vector<std::size_t>& idx) {
    if (unbounded) return;
    RatMat sub(n - 1, n);
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sub(i, j) = p.rows(idx[i], j);
    auto ns = nullspace(sub);
    if (ns.size() != 1) return;
    for (const RatVec& dir : {ns[0], vec_scale(Rat(-1), ns[0])}) {
      bool recedes = true;
      for (std::size_t i = 0; i < m && recedes; ++i)
        if (dot(p.rows.row(i), dir) < 0) recedes = false;
      if (recedes) {
        unbounded = true;
        return;
      }
    }
  });
  if (unbounded) {
    res.status = PolytopeStatus::unbounded;
    return res;
  }

  for (auto& [pt, tight] : found) res.verts.push_back(VertexRecord{pt, tight});
  return res;
}

// Every vertex exactly once, lexicographic order. Empty polytope gives an
// empty list; an unbounded feasible set is an error.
inline std::vector<VertexRecord> vertices(const HPolytope& p) {
  auto res = enumerate_vertices(p);
  if (res.status == PolytopeStatus::unbounded) throw DomainError("unbounded polyhedron");
  return res.verts;
}

inline std::vector<RatVec> vertex_points(const std::vector<VertexRecord>& vs) {
  std::vector<RatVec> pts;
  pts.reserve(vs.size());
  for (const auto& v : vs) pts.push_back(v.point);
  return pts;
}

inline int dimension_of(const std::vector<VertexRecord>& vs) {
  return affine_dim(vertex_points(vs));
}

// Affine dimension of the feasible set; -1 for empty.
inline int dimension(const HPolytope& p) { return dimension_of(vertices(p)); }

inline bool tight_contains(const VertexRecord& v, std::size_t row) {
  return std::binary_search(v.tight_rows.begin(), v.tight_rows.end(), row);
}

inline int face_dim_of(const std::vector<VertexRecord>& vs, const std::vector<std::size_t>& t) {
  std::vector<RatVec> pts;
  for (const auto& v : vs) {
    bool all = true;
    for (std::size_t r : t)
      if (!tight_contains(v, r)) {
        all = false;
        break;
      }
    if (all) pts.push_back(v.point);
  }
  return affine_dim(pts);
}

// Dimension of the face where all rows of T are tight; -1 if empty.
inline int face_dim(const HPolytope& p, const std::vector<std::size_t>& t) {
  return face_dim_of(vertices(p), t);
}

inline std::vector<std::size_t> facet_rows_of(const HPolytope& p,
                                              const std::vector<VertexRecord>& vs) {
  int dim = dimension_of(vs);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.m(); ++i) {
    std::vector<RatVec> pts;
    for (const auto& v : vs)
      if (tight_contains(v, i)) pts.push_back(v.point);
    if (!pts.empty() && affine_dim(pts) == dim - 1) out.push_back(i);
  }
  return out;
}

// Rows supporting a facet. Distinct rows supporting the same facet are all
// reported.
inline std::vector<std::size_t> facet_rows(const HPolytope& p) {
  return facet_rows_of(p, vertices(p));
}

inline std::vector<std::pair<VertexRecord, VertexRecord>> edges_of(
    const std::vector<VertexRecord>& vs) {
  std::vector<std::pair<VertexRecord, VertexRecord>> out;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j) {
      std::vector<std::size_t> common;
      std::set_intersection(vs[i].tight_rows.begin(), vs[i].tight_rows.end(),
                            vs[j].tight_rows.begin(), vs[j].tight_rows.end(),
                            std::back_inserter(common));
      std::vector<RatVec> pts;
      for (const auto& w : vs) {
        bool all = true;
        for (std::size_t r : common)
          if (!tight_contains(w, r)) {
            all = false;
            break;
          }
        if (all) pts.push_back(w.point);
      }
      if (pts.size() == 2 && affine_dim(pts) == 1) out.emplace_back(vs[i], vs[j]);
    }
  return out;
}

// All 1-dimensional faces as vertex pairs, deterministic order.
inline std::vector<std::pair<VertexRecord, VertexRecord>> edges(const HPolytope& p) {
  return edges_of(vertices(p));
}

namespace detail {

// Keep only implicit-equality rows and facet rows; exact for bounded sets.
inline void minimize_constraints(std::vector<Constraint>& cons, std::size_t nvars) {
  std::vector<RatVec> rows;
  RatVec rhs;
  for (auto& [a, c] : cons) {
    rows.push_back(a);
    rhs.push_back(c);
  }
  HPolytope p(RatMat::from_rows(rows, nvars), rhs);
  auto res = enumerate_vertices(p);
  if (res.status != PolytopeStatus::ok || res.verts.empty()) return;
  int dim = dimension_of(res.verts);
  std::vector<Constraint> kept;
  for (std::size_t i = 0; i < p.m(); ++i) {
    std::vector<RatVec> pts;
    for (const auto& v : res.verts)
      if (tight_contains(v, i)) pts.push_back(v.point);
    bool implicit_eq = pts.size() == res.verts.size();
    bool facet = !pts.empty() && affine_dim(pts) == dim - 1;
    if (implicit_eq || facet) kept.push_back(cons[i]);
  }
  cons = std::move(kept);
}

}  // namespace detail

// Image {c + L x : x in p} as an H-polytope in the target space. The map is
// factored through its column space: only the kernel directions of L are
// eliminated (with exact Fourier-Motzkin, minimizing between rounds), and
// the full-dimensional representation is pulled back along a left inverse,
// together with the affine-hull equalities of the image.
inline HPolytope project_affine_image(const HPolytope& p, const RatMat& l, const RatVec& c) {
  if (l.cols != p.n() || c.size() != l.rows) throw DimensionError("project_affine_image");
  const std::size_t t = l.rows, n = p.n();

  auto source = enumerate_vertices(p);
  if (source.status == PolytopeStatus::unbounded)
    throw DomainError("project_affine_image: unbounded source");
  if (source.verts.empty()) return HPolytope(RatMat(1, t), RatVec{Rat(1)});  // 0 >= 1

  // basis U of the column space of L
  std::vector<std::size_t> ucols;
  for (std::size_t j = 0; j < n; ++j) {
    RatMat trial(t, ucols.size() + 1);
    for (std::size_t i = 0; i < t; ++i) {
      for (std::size_t k = 0; k < ucols.size(); ++k) trial(i, k) = l(i, ucols[k]);
      trial(i, ucols.size()) = l(i, j);
    }
    if (rank(std::move(trial)) == ucols.size() + 1) ucols.push_back(j);
  }
  const std::size_t k = ucols.size();

  if (k == 0) {
    // constant map: the image is the single point c
    std::vector<RatVec> rows;
    RatVec rhs;
    for (std::size_t i = 0; i < t; ++i) {
      RatVec e(t, Rat(0));
      e[i] = 1;
      rows.push_back(e);
      rhs.push_back(c[i]);
      rows.push_back(vec_scale(Rat(-1), e));
      rhs.push_back(-c[i]);
    }
    return HPolytope(RatMat::from_rows(rows, t), rhs);
  }

  RatMat u(t, k);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < k; ++j) u(i, j) = l(i, ucols[j]);

  // L = U S with S of full row rank k
  RatMat smat(k, n);
  for (std::size_t j = 0; j < n; ++j) {
    RatVec col(t);
    for (std::size_t i = 0; i < t; ++i) col[i] = l(i, j);
    auto sj = solve_general(u, col);
    if (!sj) throw InternalError("project_affine_image: column outside the chosen basis");
    for (std::size_t i = 0; i < k; ++i) smat(i, j) = (*sj)[i];
  }

  // complete S to an invertible change of variables (u, w) = B x
  RatMat b(n, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = smat(i, j);
  {
    std::size_t have = k;
    for (std::size_t j = 0; j < n && have < n; ++j) {
      RatMat trial(have + 1, n);
      for (std::size_t i = 0; i < have; ++i)
        for (std::size_t jj = 0; jj < n; ++jj) trial(i, jj) = b(i, jj);
      trial(have, j) = 1;
      if (rank(std::move(trial)) == have + 1) {
        b(have, j) = 1;
        ++have;
      }
    }
    if (have != n) throw InternalError("project_affine_image: basis completion failed");
  }
  // x = B^{-1} (u, w): columns of the inverse
  RatMat binv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    RatVec e(n, Rat(0));
    e[j] = 1;
    auto col = solve_square(b, e);
    if (!col) throw InternalError("project_affine_image: change of variables is singular");
    for (std::size_t i = 0; i < n; ++i) binv(i, j) = (*col)[i];
  }

  // constraints of p in the (u, w) variables; eliminate the w block
  std::vector<detail::Constraint> cons;
  for (std::size_t i = 0; i < p.m(); ++i) {
    RatVec a(n, Rat(0));
    for (std::size_t j = 0; j < n; ++j) {
      Rat acc = 0;
      for (std::size_t x = 0; x < n; ++x) acc += p.rows(i, x) * binv(x, j);
      a[j] = acc;
    }
    cons.emplace_back(std::move(a), p.rhs[i]);
  }
  for (std::size_t var = n; var-- > k;) {
    detail::fm_eliminate_var(cons, var);
    detail::minimize_constraints(cons, n);
  }

  // pull back along a left inverse of U, and pin the affine hull of the image
  RatMat ut(k, t);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < k; ++j) ut(j, i) = u(i, j);
  RatMat gram(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      Rat acc = 0;
      for (std::size_t x = 0; x < t; ++x) acc += u(x, i) * u(x, j);
      gram(i, j) = acc;
    }
  RatMat uplus(k, t);  // (U^T U)^{-1} U^T
  for (std::size_t j = 0; j < t; ++j) {
    RatVec col(k);
    for (std::size_t i = 0; i < k; ++i) col[i] = ut(i, j);
    auto sol = solve_square(gram, col);
    if (!sol) throw InternalError("project_affine_image: Gram matrix is singular");
    for (std::size_t i = 0; i < k; ++i) uplus(i, j) = (*sol)[i];
  }

  std::vector<RatVec> rows;
  RatVec rhs;
  for (const RatVec& nvec : nullspace(ut)) {  // vectors orthogonal to the column space
    Rat off = dot(nvec, c);
    rows.push_back(nvec);
    rhs.push_back(off);
    rows.push_back(vec_scale(Rat(-1), nvec));
    rhs.push_back(-off);
  }
  for (auto& [a, cc] : cons) {
    RatVec au(a.begin(), a.begin() + k);
    RatVec ay(t, Rat(0));
    for (std::size_t i = 0; i < t; ++i) {
      Rat acc = 0;
      for (std::size_t j = 0; j < k; ++j) acc += au[j] * uplus(j, i);
      ay[i] = acc;
    }
    rows.push_back(ay);
    rhs.push_back(cc + dot(ay, c));
  }
  return HPolytope(RatMat::from_rows(rows, t), rhs);
}

}  // namespace horo
