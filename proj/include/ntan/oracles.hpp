#pragma once

// Closed-form expressions for covariant derivatives and characteristic fields,
// written out index by index.  They share nothing with the tower code beyond
// Christoffel evaluation and serve as cross-checks.

#include "ntan/connection.hpp"
#include "ntan/linalg.hpp"

namespace ntan::oracles {

// Coordinate jets of a curve (or frame) at one parameter value.
struct CurveJet {
  Vec x;   // gamma(t)
  Vec d1;  // gamma'
  Vec d2;  // gamma''
  Vec d3;  // gamma'''
};

// (nabla^2 gamma)^l = gamma''^l + Gamma^l_{mu nu} gamma'^mu gamma'^nu
Vec second_covariant(const Connection& c, const CurveJet& g);

// (nabla^3 gamma)^l = gamma'''^l
//   + (Gamma^l_{mu nu,k} + Gamma^l_{k r} Gamma^r_{mu nu}) gamma'^mu gamma'^nu gamma'^k
//   + (2 Gamma^l_{mu nu} + Gamma^l_{nu mu}) gamma'^mu gamma''^nu
Vec third_covariant(const Connection& c, const CurveJet& g);

// Characteristic field of the tangent surface of an immersed curve, valid
// with torsion:
//   gamma''' + (Gamma^l_{mu nu,k} + 1/2 Gamma^l_{r mu} Gamma^r_{nu k}
//               + 1/2 Gamma^l_{mu r} Gamma^r_{nu k}) gamma'^mu gamma'^nu gamma'^k
//            + 3/2 (Gamma^l_{mu nu} + Gamma^l_{nu mu}) gamma'^mu gamma''^nu
Vec characteristic_field_immersed(const Connection& c, const CurveJet& g);

// Characteristic field for a directed curve gamma' = c u:
//   u'' + c' Gamma^l_{mu nu} u^mu u^nu + 3/2 c (Gamma^l_{mu nu} + Gamma^l_{nu mu}) u^nu u'^mu
//   + 1/2 c^2 (2 Gamma^l_{mu nu,k} + Gamma^l_{r mu} Gamma^r_{k nu}
//              + Gamma^l_{mu r} Gamma^r_{k nu}) u^mu u^nu u^k
// x is the curve point; u, du, ddu the frame and its coordinate derivatives.
Vec characteristic_field_directed(const Connection& c, const Vec& x, const Vec& u, const Vec& du,
                                  const Vec& ddu, double factor, double factor_dt);

}  // namespace ntan::oracles
