#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tdacloud {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
  friend auto operator<=>(const Point3&, const Point3&) = default;

  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Point3 operator+(Point3 a, const Point3& b) { return a += b; }
  friend Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }

  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }
inline double squared_distance(const Point3& a, const Point3& b) {
  const Point3 d = a - b;
  return dot(d, d);
}

/// An ordered set of points plus identity. Point order is significant:
/// downsampling and file output preserve it.
struct PointCloud {
  std::string id;
  std::vector<Point3> points;
  std::string source;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Throws DataError if the cloud is empty or holds a non-finite coordinate.
void validate_cloud(const PointCloud& cloud);

// ---------------------------------------------------------------------------
// File formats

enum class CloudFormat { xyz, ply_ascii, kitti_bin };

std::string_view to_string(CloudFormat format);
CloudFormat parse_cloud_format(std::string_view name);

/// Guess the format from the file extension (.xyz/.txt, .ply, .bin).
std::optional<CloudFormat> format_from_extension(const std::filesystem::path& path);

/// Reads a cloud. The id defaults to the file stem.
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format,
                      std::optional<std::string> id = std::nullopt);

/// Reads a cloud, inferring the format from the extension.
PointCloud load_cloud(const std::filesystem::path& path);

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);

// ---------------------------------------------------------------------------
// Preprocessing

/// Keeps every k-th point, k = floor(size / target). No-op when the cloud
/// already has at most `target` points.
PointCloud downsample_uniform(const PointCloud& cloud, std::size_t target);

/// Centers the cloud on its mean and divides by the largest absolute
/// centered coordinate so that every coordinate lies in [-1, 1].
PointCloud normalize(const PointCloud& cloud);

// ---------------------------------------------------------------------------
// Perturbations

/// Adds N(0, sigma^2) noise to every coordinate of a seeded random subset of
/// round(fraction * size) points.
PointCloud jitter(const PointCloud& cloud, double fraction, double sigma, std::uint64_t seed);
PointCloud scale(const PointCloud& cloud, double factor);
PointCloud translate(const PointCloud& cloud, const Point3& offset);
/// Rotation about an origin-anchored unit axis (Rodrigues formula).
PointCloud rotate(const PointCloud& cloud, const Point3& axis, double degrees);

enum class PerturbationKind { jitter, scale, translate, rotate };

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::jitter;
  double fraction = 0.05;
  double sigma = 1e-3;
  double factor = 1.0;
  Point3 offset{};
  Point3 axis{0.0, 0.0, 1.0};
  double degrees = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
  std::string describe() const;
};

PerturbationKind parse_perturbation_kind(std::string_view name);
PointCloud apply_perturbation(const PointCloud& cloud, const PerturbationSpec& spec);

// ---------------------------------------------------------------------------
// Synthetic shapes

enum class ShapeKind { sphere, torus, cube_corners, circle };

ShapeKind parse_shape_kind(std::string_view name);

struct ShapeParams {
  double radius = 1.0;  // sphere, circle
  double major = 2.0;   // torus
  double minor = 0.5;   // torus
  double side = 2.0;    // cube_corners
};

/// Deterministic sample of `n` points on the shape surface. cube_corners
/// ignores `n` and returns the eight corners.
PointCloud synth_shape(ShapeKind shape, std::size_t n, std::uint64_t seed, const ShapeParams& params = {});

}  // namespace tdacloud
