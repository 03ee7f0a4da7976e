#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "horolmmp/rational.hpp"

namespace horo {

using RatVec = std::vector<Rat>;
using IntVec = std::vector<Int>;

inline RatVec rat_vec(const IntVec& v) {
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);
  return out;
}

inline bool lex_less(const RatVec& a, const RatVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Dense row-major matrix with explicit dimensions. Mismatched data is a
// construction-time error.
struct RatMat {
  std::size_t rows = 0, cols = 0;
  std::vector<Rat> a;

  RatMat() = default;
  RatMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  static RatMat from_rows(const std::vector<RatVec>& rws, std::size_t ncols) {
    RatMat m(rws.size(), ncols);
    for (std::size_t i = 0; i < rws.size(); ++i) {
      if (rws[i].size() != ncols) throw DimensionError("ragged rows in matrix literal");
      for (std::size_t j = 0; j < ncols; ++j) m(i, j) = rws[i][j];
    }
    return m;
  }

  Rat& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  RatVec row(std::size_t i) const {
    RatVec out(cols);
    for (std::size_t j = 0; j < cols; ++j) out[j] = (*this)(i, j);
    return out;
  }

  bool operator==(const RatMat& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

inline Rat dot(const RatVec& x, const RatVec& y) {
  if (x.size() != y.size()) throw DimensionError("dot: size mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline RatVec vec_add(const RatVec& x, const RatVec& y) {
  if (x.size() != y.size()) throw DimensionError("vec_add: size mismatch");
  RatVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

inline RatVec vec_sub(const RatVec& x, const RatVec& y) {
  if (x.size() != y.size()) throw DimensionError("vec_sub: size mismatch");
  RatVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

inline RatVec vec_scale(const Rat& c, const RatVec& x) {
  RatVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
  return out;
}

inline bool vec_is_zero(const RatVec& x) {
  for (const Rat& v : x)
    if (v != 0) return false;
  return true;
}

inline RatVec mat_vec(const RatMat& m, const RatVec& x) {
  if (m.cols != x.size()) throw DimensionError("mat_vec: size mismatch");
  RatVec out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    Rat s = 0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

// Row echelon form by exact Gaussian elimination. Returns the pivot columns;
// `m` is modified in place. If `rhs` is non-null it is carried along.
inline std::vector<std::size_t> echelon(RatMat& m, RatVec* rhs = nullptr) {
  std::vector<std::size_t> pivots;
  std::size_t prow = 0;
  for (std::size_t col = 0; col < m.cols && prow < m.rows; ++col) {
    std::size_t sel = prow;
    while (sel < m.rows && m(sel, col) == 0) ++sel;
    if (sel == m.rows) continue;
    if (sel != prow) {
      for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(prow, j), m(sel, j));
      if (rhs) std::swap((*rhs)[prow], (*rhs)[sel]);
    }
    Rat inv = Rat(1) / m(prow, col);
    for (std::size_t j = col; j < m.cols; ++j) m(prow, j) *= inv;
    if (rhs) (*rhs)[prow] *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == prow || m(i, col) == 0) continue;
      Rat f = m(i, col);
      for (std::size_t j = col; j < m.cols; ++j) m(i, j) -= f * m(prow, j);
      if (rhs) (*rhs)[i] -= f * (*rhs)[prow];
    }
    pivots.push_back(col);
    ++prow;
  }
  return pivots;
}

inline std::size_t rank(RatMat m) { return echelon(m).size(); }

// Unique solution of a square system, or nothing when A is singular.
inline std::optional<RatVec> solve_square(const RatMat& a, const RatVec& b) {
  if (a.rows != a.cols) throw DimensionError("solve_square: matrix not square");
  if (b.size() != a.rows) throw DimensionError("solve_square: rhs size mismatch");
  RatMat m = a;
  RatVec r = b;
  auto pivots = echelon(m, &r);
  if (pivots.size() != a.cols) return std::nullopt;
  return r;
}

// Any solution of A x = b, or nothing when the system is inconsistent.
inline std::optional<RatVec> solve_general(const RatMat& a, const RatVec& b) {
  if (b.size() != a.rows) throw DimensionError("solve_general: rhs size mismatch");
  RatMat m = a;
  RatVec r = b;
  auto pivots = echelon(m, &r);
  for (std::size_t i = pivots.size(); i < m.rows; ++i)
    if (r[i] != 0) return std::nullopt;
  RatVec x(a.cols, Rat(0));
  for (std::size_t k = 0; k < pivots.size(); ++k) x[pivots[k]] = r[k];
  return x;
}

// Basis of {x : A x = 0}.
inline std::vector<RatVec> nullspace(const RatMat& a) {
  RatMat m = a;
  auto pivots = echelon(m);
  std::vector<bool> is_pivot(a.cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<RatVec> basis;
  for (std::size_t free = 0; free < a.cols; ++free) {
    if (is_pivot[free]) continue;
    RatVec v(a.cols, Rat(0));
    v[free] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -m(k, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Affine dimension of a point set; -1 for the empty set.
inline int affine_dim(const std::vector<RatVec>& pts) {
  if (pts.empty()) return -1;
  if (pts.size() == 1) return 0;
  RatMat diffs(pts.size() - 1, pts[0].size());
  for (std::size_t i = 1; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts[0].size(); ++j)
      diffs(i - 1, j) = pts[i][j] - pts[0][j];
  return static_cast<int>(rank(std::move(diffs)));
}

}  // namespace horo
