#pragma once

#include <tdacloud/tdacloud.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace tdacloud::test {

// Points sampled uniformly on the surface of an axis-aligned box centered at
// the origin, then displaced by isotropic Gaussian noise.
PointCloud box_surface(std::size_t n, const Point3& extent, double noise, std::uint64_t seed);

// An ellipsoid obtained by stretching a unit-sphere sample.
PointCloud ellipsoid(std::size_t n, const Point3& axes, std::uint64_t seed);

// Independent area-weighted samples of a torus surface.
PointCloud random_torus(std::size_t n, double major, double minor, std::uint64_t seed);

// Mixed database of ellipsoids, tori and noisy boxes. Shape parameters sweep
// evenly across each family; every cloud is normalized to zero mean and [-1, 1].
std::vector<PointCloud> recognition_database(std::size_t count, std::size_t n, std::uint64_t seed);

// Small random cloud in the unit cube.
PointCloud random_cloud(std::size_t n, std::uint64_t seed, const std::string& id = "random");

}  // namespace tdacloud::test
