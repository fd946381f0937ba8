#include "fixtures.hpp"

#include <cmath>
#include <random>

namespace tdacloud::test {

PointCloud box_surface(std::size_t n, const Point3& extent, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, noise);
  const double ax = extent.x * extent.y, ay = extent.y * extent.z, az = extent.x * extent.z;
  std::discrete_distribution<int> face({ay, ay, az, az, ax, ax});
  PointCloud out;
  out.id = "box";
  out.source = "fixture:box";
  out.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int f = face(rng);
    Point3 p{unit(rng) * extent.x, unit(rng) * extent.y, unit(rng) * extent.z};
    const double s = (f % 2 == 0) ? 1.0 : -1.0;
    if (f < 2) p.x = s * extent.x;
    else if (f < 4) p.y = s * extent.y;
    else p.z = s * extent.z;
    if (noise > 0.0) p += Point3{gauss(rng), gauss(rng), gauss(rng)};
    out.points.push_back(p);
  }
  return out;
}

PointCloud ellipsoid(std::size_t n, const Point3& axes, std::uint64_t seed) {
  PointCloud out = synth_shape(ShapeKind::sphere, n, seed);
  for (auto& p : out.points) p = {p.x * axes.x, p.y * axes.y, p.z * axes.z};
  out.id = "ellipsoid";
  return out;
}

PointCloud random_torus(std::size_t n, double major, double minor, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double two_pi = 6.283185307179586;
  PointCloud out;
  out.id = "torus";
  out.source = "fixture:torus";
  out.points.reserve(n);
  while (out.points.size() < n) {
    const double u = two_pi * unit(rng);
    const double v = two_pi * unit(rng);
    if (unit(rng) * (major + minor) > major + minor * std::cos(v)) continue;
    const double ring = major + minor * std::cos(v);
    out.points.push_back({ring * std::cos(u), ring * std::sin(u), minor * std::sin(v)});
  }
  return out;
}

std::vector<PointCloud> recognition_database(std::size_t count, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PointCloud> out;
  out.reserve(count);
  const std::size_t per_family = (count + 2) / 3;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t cloud_seed = rng();
    const double t = per_family > 1 ? static_cast<double>(i / 3) / static_cast<double>(per_family - 1) : 0.0;
    PointCloud c;
    std::string family;
    switch (i % 3) {
      case 0:
        family = "ellipsoid";
        c = ellipsoid(n, {1.0, 1.0 - 0.5 * t, 0.9 - 0.6 * t}, cloud_seed);
        break;
      case 1: {
        family = "torus";
        c = random_torus(n, 2.0, 0.3 + 0.9 * t, cloud_seed);
        break;
      }
      default:
        family = "box";
        c = box_surface(n, {1.0, 1.0 - 0.6 * t, 0.8 - 0.6 * t}, 0.01, cloud_seed);
        break;
    }
    c = normalize(c);
    c.id = family + "_" + std::to_string(i);
    c.source = "fixture:" + family;
    out.push_back(std::move(c));
  }
  return out;
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed, const std::string& id) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud out;
  out.id = id;
  out.source = "fixture:random";
  for (std::size_t i = 0; i < n; ++i) out.points.push_back({u(rng), u(rng), u(rng)});
  return out;
}

}  // namespace tdacloud::test
