#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tdacloud/point_cloud.hpp"

namespace tdacloud {

/// Finite tetrahedra of a 3D Delaunay triangulation. Vertex ids index the
/// input span; every tetrahedron is positively oriented
/// (predicates::orient3d > 0).
struct DelaunayMesh {
  std::vector<std::array<std::int32_t, 4>> tetrahedra;
};

/// Incremental Delaunay tetrahedralization with exact predicates.
/// Cospherical and coplanar ties are broken by a symbolic perturbation of
/// the lifting map ordered by point index, so the output is unique for a
/// given input. Points must be pairwise distinct. Throws
/// DegenerateInputError when the points do not span 3D.
DelaunayMesh delaunay3d(std::span<const Point3> points);

}  // namespace tdacloud
