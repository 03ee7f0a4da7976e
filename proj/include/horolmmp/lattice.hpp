#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "horolmmp/linalg.hpp"

namespace horo {

inline Int int_gcd(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline Int ivec_gcd(const IntVec& v) {
  Int g = 0;
  for (const Int& x : v) g = int_gcd(g, x);
  return g;
}

inline bool ivec_is_zero(const IntVec& v) {
  for (const Int& x : v)
    if (x != 0) return false;
  return true;
}

// Free sublattice of Z^ambient_dim given by independent basis rows.
struct LatticeBasis {
  std::size_t ambient_dim = 0;
  std::vector<IntVec> basis_rows;

  LatticeBasis() = default;
  LatticeBasis(std::size_t dim, std::vector<IntVec> rows)
      : ambient_dim(dim), basis_rows(std::move(rows)) {
    RatMat m(basis_rows.size(), ambient_dim);
    for (std::size_t i = 0; i < basis_rows.size(); ++i) {
      if (basis_rows[i].size() != ambient_dim)
        throw DimensionError("lattice basis row has wrong length");
      for (std::size_t j = 0; j < ambient_dim; ++j) m(i, j) = Rat(basis_rows[i][j]);
    }
    if (horo::rank(std::move(m)) != basis_rows.size())
      throw DimensionError("lattice basis rows are linearly dependent");
  }

  static LatticeBasis standard(std::size_t n) {
    std::vector<IntVec> rows(n, IntVec(n, Int(0)));
    for (std::size_t i = 0; i < n; ++i) rows[i][i] = 1;
    return LatticeBasis(n, std::move(rows));
  }

  std::size_t rank() const { return basis_rows.size(); }

  // basis_rows^T as a rational matrix (ambient_dim x rank); maps lattice
  // coordinates to ambient coordinates.
  RatMat embedding() const {
    RatMat m(ambient_dim, basis_rows.size());
    for (std::size_t i = 0; i < basis_rows.size(); ++i)
      for (std::size_t j = 0; j < ambient_dim; ++j) m(j, i) = Rat(basis_rows[i][j]);
    return m;
  }
};

// Coordinates of v in the lattice basis, if v lies in the rational span.
inline std::optional<RatVec> lattice_coords(const RatVec& v, const LatticeBasis& l) {
  if (v.size() != l.ambient_dim) throw DimensionError("lattice_coords: size mismatch");
  return solve_general(l.embedding(), v);
}

inline bool in_lattice(const RatVec& v, const LatticeBasis& l) {
  auto c = lattice_coords(v, l);
  if (!c) return false;
  for (const Rat& x : *c)
    if (rat_den(x) != 1) return false;
  return true;
}

// Basis of the saturated kernel {c in Z^r : c M = 0} for an integer matrix M
// given as r rows of length `cols`. Row-reduces M with unimodular operations
// and reads the kernel off the transformation matrix.
inline std::vector<IntVec> integer_kernel(std::vector<IntVec> m, std::size_t cols) {
  const std::size_t r = m.size();
  std::vector<IntVec> u(r, IntVec(r, Int(0)));
  for (std::size_t i = 0; i < r; ++i) u[i][i] = 1;

  std::size_t prow = 0;
  for (std::size_t col = 0; col < cols && prow < r; ++col) {
    for (;;) {
      std::size_t best = r;
      for (std::size_t i = prow; i < r; ++i) {
        if (m[i][col] == 0) continue;
        if (best == r || abs(m[i][col]) < abs(m[best][col])) best = i;
      }
      if (best == r) break;
      std::swap(m[prow], m[best]);
      std::swap(u[prow], u[best]);
      bool clean = true;
      for (std::size_t i = prow + 1; i < r; ++i) {
        if (m[i][col] == 0) continue;
        Int q = m[i][col] / m[prow][col];
        if (q != 0) {
          for (std::size_t j = 0; j < cols; ++j) m[i][j] -= q * m[prow][j];
          for (std::size_t j = 0; j < r; ++j) u[i][j] -= q * u[prow][j];
        }
        if (m[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (m[prow][col] != 0) ++prow;
  }
  std::vector<IntVec> kernel;
  for (std::size_t i = prow; i < r; ++i) kernel.push_back(u[i]);
  return kernel;
}

// Writes v = length * primitive with `primitive` a primitive vector of the
// lattice and length > 0. v must be nonzero and in the rational span.
inline std::pair<IntVec, Rat> primitive_and_length(const IntVec& v, const LatticeBasis& l) {
  if (ivec_is_zero(v)) throw DomainError("primitive_and_length: zero vector");
  auto coords = lattice_coords(rat_vec(v), l);
  if (!coords) throw DomainError("primitive_and_length: vector outside lattice span");
  Int denom = 1;
  for (const Rat& c : *coords) denom = denom / int_gcd(denom, rat_den(c)) * rat_den(c);
  IntVec scaled(coords->size());
  for (std::size_t i = 0; i < coords->size(); ++i)
    scaled[i] = rat_num((*coords)[i]) * (denom / rat_den((*coords)[i]));
  Int g = ivec_gcd(scaled);
  IntVec prim(l.ambient_dim, Int(0));
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    Int c = scaled[i] / g;
    if (c == 0) continue;
    for (std::size_t j = 0; j < l.ambient_dim; ++j) prim[j] += c * l.basis_rows[i][j];
  }
  return {prim, Rat(g, denom)};
}

// Integral length of a rational vector with respect to the lattice.
inline Rat integral_length(const RatVec& u, const LatticeBasis& l) {
  Int denom = 1;
  for (const Rat& c : u) denom = denom / int_gcd(denom, rat_den(c)) * rat_den(c);
  IntVec w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = rat_num(u[i]) * (denom / rat_den(u[i]));
  auto [prim, len] = primitive_and_length(w, l);
  return len / Rat(denom);
}

// Saturated intersection of the lattice with a rational subspace of its span.
inline LatticeBasis lattice_intersect_subspace(const LatticeBasis& l,
                                               const std::vector<RatVec>& subspace_basis) {
  for (const RatVec& v : subspace_basis)
    if (!lattice_coords(v, l))
      throw DomainError("lattice_intersect_subspace: subspace not inside lattice span");

  // Directions orthogonal to the subspace; c*L lies in the subspace iff
  // c*(L Y^T) = 0 for all such directions y.
  RatMat vmat(subspace_basis.size(), l.ambient_dim);
  for (std::size_t i = 0; i < subspace_basis.size(); ++i) {
    if (subspace_basis[i].size() != l.ambient_dim)
      throw DimensionError("subspace basis vector has wrong length");
    for (std::size_t j = 0; j < l.ambient_dim; ++j) vmat(i, j) = subspace_basis[i][j];
  }
  std::vector<RatVec> perp = nullspace(vmat);

  const std::size_t k = l.rank();
  std::vector<IntVec> b(k, IntVec(perp.size(), Int(0)));
  for (std::size_t t = 0; t < perp.size(); ++t) {
    std::vector<Rat> col(k);
    Int denom = 1;
    for (std::size_t i = 0; i < k; ++i) {
      Rat s = 0;
      for (std::size_t j = 0; j < l.ambient_dim; ++j) s += Rat(l.basis_rows[i][j]) * perp[t][j];
      col[i] = s;
      denom = denom / int_gcd(denom, rat_den(s)) * rat_den(s);
    }
    for (std::size_t i = 0; i < k; ++i) b[i][t] = rat_num(col[i]) * (denom / rat_den(col[i]));
  }

  std::vector<IntVec> ker = integer_kernel(std::move(b), perp.size());
  std::vector<IntVec> rows;
  for (const IntVec& c : ker) {
    IntVec row(l.ambient_dim, Int(0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < l.ambient_dim; ++j) row[j] += c[i] * l.basis_rows[i][j];
    rows.push_back(std::move(row));
  }
  return LatticeBasis(l.ambient_dim, std::move(rows));
}

}  // namespace horo
