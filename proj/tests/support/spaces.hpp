#pragma once

// Shared constructions for the worked examples used across the test suites.

#include <cstdlib>
#include <string>

#include "horolmmp/model.hpp"

namespace testdata {

using namespace horo;

// SL3-type rank-one space: two colors, M generated by w_alpha + 2 w_beta.
inline SpaceData sl3_space() {
  SpaceData s;
  s.weight_dim = 2;
  s.basis_labels = {"alpha", "beta"};
  s.colors = {{"alpha", {Int(1), Int(0)}, Int(2), 0}, {"beta", {Int(0), Int(1)}, Int(2), 1}};
  s.lattice_M = LatticeBasis(2, {{Int(1), Int(2)}});
  s.gstable = {{"X1", {Int(1)}}, {"X2", {Int(-1)}}};
  return s;
}

inline BStableDivisor sl3_D() { return {{Rat(1), Rat(1)}, {Rat(4), Rat(4)}}; }

// SL2 x C* space with one color and full lattice; carries both triangle
// examples.
inline SpaceData ex_space() {
  SpaceData s;
  s.weight_dim = 2;
  s.basis_labels = {"alpha", "omega0"};
  s.colors = {{"alpha", {Int(1), Int(0)}, Int(2), 0}};
  s.lattice_M = LatticeBasis::standard(2);
  s.gstable = {{"X1", {Int(1), Int(-1)}}, {"X2", {Int(2), Int(1)}}, {"X3", {Int(-1), Int(0)}}};
  return s;
}

inline BStableDivisor ex1_D(const Rat& b1 = 3, const Rat& b3 = 2) {
  return {{b1, -b1, b3}, {Rat(0)}};
}

inline BStableDivisor ex2_D(const Rat& b1 = 3, const Rat& b2 = -4, const Rat& b3 = 2) {
  return {{b1, b2, b3}, {Rat(0)}};
}

inline BStableDivisor ex_delta(const Rat& d1, const Rat& d2, const Rat& d3, const Rat& da) {
  return {{d1, d2, d3}, {da}};
}

// Toric rectangle (a P1 x P1 datum): no colors.
inline SpaceData rect_space() {
  SpaceData s;
  s.weight_dim = 2;
  s.basis_labels = {"e1", "e2"};
  s.lattice_M = LatticeBasis::standard(2);
  s.gstable = {{"X1", {Int(1), Int(0)}},
               {"X2", {Int(-1), Int(0)}},
               {"X3", {Int(0), Int(1)}},
               {"X4", {Int(0), Int(-1)}}};
  return s;
}

inline BStableDivisor rect_D() { return {{Rat(0), Rat(2), Rat(0), Rat(3)}, {}}; }

inline std::string fixture_path(const std::string& name) {
  const char* dir = std::getenv("HOROLMMP_FIXTURES");
  return std::string(dir ? dir : "fixtures") + "/" + name;
}

inline RatVec rv(std::initializer_list<int> xs) {
  RatVec out;
  for (int x : xs) out.push_back(Rat(x));
  return out;
}

inline IntVec iv(std::initializer_list<int> xs) {
  IntVec out;
  for (int x : xs) out.push_back(Int(x));
  return out;
}

}  // namespace testdata
