#pragma once

#include <string>

#include "capkit/pointset.hpp"

namespace capkit {

// smallest element of absolute trace 1, so constructions are deterministic
inline elem smallest_trace_one(const FieldTable& F) {
  for (unsigned a = 1; a < F.q(); ++a)
    if (F.trace(static_cast<elem>(a)) == 1) return static_cast<elem>(a);
  throw consistency_error("no trace-1 element in GF(" + std::to_string(F.q()) +
                          ")");
}

struct ConstructionSpec {
  std::string kind;
  unsigned q = 0;
  int n = 0;
  elem irreducible_parameter = 0;  // a with x^2+x+a irreducible, quadric only
};

// {x0*x1 = x2^2 + x2*x3 + a*x3^2} with tr(a) = 1: a (q^2+1)-cap
inline point_set elliptic_quadric(const Geometry& G) {
  if (G.n() != 3)
    throw dimension_error("elliptic quadric lives in PG(3,q)");
  if (G.q() <= 2) throw range_error("elliptic quadric requires q > 2");
  const auto& F = G.field();
  const elem a = smallest_trace_one(F);
  point_set K;
  for (int i = 0; i < G.num_points(); ++i) {
    const coords& c = G.point(i);
    const elem lhs = F.mul(c[0], c[1]);
    const elem rhs = FieldTable::add(
        FieldTable::add(F.mul(c[2], c[2]), F.mul(c[2], c[3])),
        F.mul(a, F.mul(c[3], c[3])));
    if (lhs == rhs) K.push_back(i);
  }
  return K;
}

inline ConstructionSpec elliptic_quadric_spec(const Geometry& G) {
  ConstructionSpec s;
  s.kind = "elliptic_quadric";
  s.q = G.q();
  s.n = 3;
  s.irreducible_parameter = smallest_trace_one(G.field());
  return s;
}

// conic {(1,t,t^2)} plus (0,0,1) and its nucleus (0,1,0): a (q+2)-arc
inline point_set hyperoval_conic(const Geometry& G) {
  if (G.n() != 2) throw dimension_error("conic hyperoval lives in PG(2,q)");
  const auto& F = G.field();
  point_set A;
  for (unsigned t = 0; t < G.q(); ++t) {
    const auto e = static_cast<elem>(t);
    A.push_back(G.index_of({1, e, F.mul(e, e), 0}));
  }
  A.push_back(G.index_of({0, 0, 1, 0}));
  A.push_back(G.index_of({0, 1, 0, 0}));
  return canonical_set(G, A);
}

// the 2^n points off the hyperplane x0 = 0; materialized only for n = 3
inline point_set binary_affine_cap(const Geometry& G) {
  if (G.n() != 3 || G.q() != 2)
    throw dimension_error("affine binary cap is materialized only in PG(3,2)");
  point_set K;
  for (int i = 0; i < G.num_points(); ++i)
    if (G.point(i)[0] != 0) K.push_back(i);
  return K;
}

inline long long binary_cap_size(int n) {
  if (n < 3) throw range_error("binary cap size requires n >= 3");
  if (n >= 63) throw range_error("binary cap size overflows past n = 62");
  return 1LL << n;
}

}  // namespace capkit
