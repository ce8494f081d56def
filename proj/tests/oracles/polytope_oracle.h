#pragma once

#include "narycsg/boolfn.h"
#include "narycsg/types.h"

#include <utility>
#include <vector>

// Test-side geometry computed by routes independent of the library: convex
// polytopes as half-space lists solved by triple enumeration, and volumes of
// boolean combinations of axis-aligned boxes by exact grid decomposition.
namespace ncsg::testor {

struct HalfSpace {
  Vec3 n;    // unit outward normal
  double d;  // inside: n.dot(x) <= d
};

std::vector<HalfSpace> box_halfspaces(const Vec3& lo, const Vec3& hi);

// All vertices of the (assumed bounded, nonempty) intersection: every
// invertible triple of planes, filtered by the remaining constraints,
// deduplicated within tol.
std::vector<Vec3> polytope_vertices(const std::vector<HalfSpace>& hs, double tol = 1e-9);

// Divergence-theorem volume over the polytope's faces.
double polytope_volume(const std::vector<HalfSpace>& hs, double tol = 1e-9);

// Exact volume of { x : fn(inside-bits of x) = 1 } for axis-aligned boxes
// (lo, hi). Requires fn(all-outside) = 0, otherwise the set is unbounded.
double boxes_function_volume(const std::vector<std::pair<Vec3, Vec3>>& boxes,
                             const BoolFn& fn);

}  // namespace ncsg::testor
