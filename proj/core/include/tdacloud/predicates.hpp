#pragma once

#include "tdacloud/point_cloud.hpp"

/// Exact geometric predicates. Each one first evaluates in double precision
/// with a forward error bound and falls back to exact rational arithmetic
/// only when the sign is not certified.
namespace tdacloud::predicates {

/// Sign of det[b - a, c - a, d - a]: +1 when d lies on the side of plane
/// (a, b, c) that makes the tetrahedron positively oriented.
int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// +1 when e lies strictly inside the circumsphere of the positively
/// oriented tetrahedron (a, b, c, d), -1 outside, 0 on the sphere.
int insphere(const Point3& a, const Point3& b, const Point3& c, const Point3& d, const Point3& e);

/// For coplanar a, b, c, q with (a, b, c) not collinear: +1 when q lies
/// strictly inside the circumcircle of (a, b, c), -1 outside, 0 on it.
int coplanar_incircle(const Point3& a, const Point3& b, const Point3& c, const Point3& q);

/// For coplanar points: sign of ((b - a) x (x - a)) . ((b - a) x (c - a)),
/// i.e. +1 when x lies on the same side of line (a, b) as c.
int coplanar_same_side(const Point3& a, const Point3& b, const Point3& x, const Point3& c);

/// Number of times the exact fallback ran in this thread (diagnostics).
unsigned long long exact_fallback_count();

}  // namespace tdacloud::predicates
