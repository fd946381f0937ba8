#include "tdacloud/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "random.hpp"
#include "tdacloud/errors.hpp"

namespace tdacloud {

void validate_cloud(const PointCloud& cloud) {
  if (cloud.points.empty()) {
    throw DataError("point cloud '" + cloud.id + "' is empty");
  }
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (!cloud.points[i].finite()) {
      throw DataError("point cloud '" + cloud.id + "' has a non-finite coordinate at point " +
                      std::to_string(i));
    }
  }
}

PointCloud downsample_uniform(const PointCloud& cloud, std::size_t target) {
  if (target == 0) {
    throw ArgumentError("downsample target must be at least 1");
  }
  if (cloud.points.size() <= target) {
    return cloud;
  }
  const std::size_t stride = cloud.points.size() / target;
  PointCloud out{cloud.id, {}, cloud.source};
  out.points.reserve(cloud.points.size() / stride + 1);
  for (std::size_t i = 0; i < cloud.points.size(); i += stride) {
    out.points.push_back(cloud.points[i]);
  }
  return out;
}

PointCloud normalize(const PointCloud& cloud) {
  if (cloud.points.empty()) {
    throw ArgumentError("cannot normalize an empty point cloud");
  }
  Point3 mean{};
  for (const auto& p : cloud.points) {
    mean += p;
  }
  mean = (1.0 / static_cast<double>(cloud.points.size())) * mean;

  PointCloud out{cloud.id, {}, cloud.source};
  out.points.reserve(cloud.points.size());
  double extent = 0.0;
  for (const auto& p : cloud.points) {
    const Point3 c = p - mean;
    extent = std::max({extent, std::abs(c.x), std::abs(c.y), std::abs(c.z)});
    out.points.push_back(c);
  }
  if (extent > 0.0) {
    for (auto& p : out.points) {
      p = {p.x / extent, p.y / extent, p.z / extent};
    }
  }
  return out;
}

PointCloud jitter(const PointCloud& cloud, double fraction, double sigma, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ArgumentError("jitter fraction must lie in [0, 1]");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ArgumentError("jitter sigma must be positive");
  }
  PointCloud out = cloud;
  const std::size_t n = cloud.points.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (count == 0) {
    return out;
  }

  detail::Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` slots become the chosen subset.
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(order[i], order[i + rng.below(n - i)]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    Point3& p = out.points[order[i]];
    p.x += sigma * rng.normal();
    p.y += sigma * rng.normal();
    p.z += sigma * rng.normal();
  }
  return out;
}

PointCloud scale(const PointCloud& cloud, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw ArgumentError("scale factor must be positive");
  }
  PointCloud out = cloud;
  for (auto& p : out.points) {
    p = factor * p;
  }
  return out;
}

PointCloud translate(const PointCloud& cloud, const Point3& offset) {
  if (!offset.finite()) {
    throw ArgumentError("translation offset must be finite");
  }
  PointCloud out = cloud;
  for (auto& p : out.points) {
    p += offset;
  }
  return out;
}

namespace {

// Exact sine/cosine for whole multiples of 90 degrees.
std::pair<double, double> sin_cos_degrees(double degrees) {
  const double turns = degrees / 90.0;
  if (std::isfinite(turns) && turns == std::round(turns) && std::abs(turns) < 1e15) {
    const auto q = static_cast<long long>(std::round(turns));
    switch (((q % 4) + 4) % 4) {
      case 0: return {0.0, 1.0};
      case 1: return {1.0, 0.0};
      case 2: return {0.0, -1.0};
      default: return {-1.0, 0.0};
    }
  }
  const double rad = degrees * std::numbers::pi / 180.0;
  return {std::sin(rad), std::cos(rad)};
}

}  // namespace

PointCloud rotate(const PointCloud& cloud, const Point3& axis, double degrees) {
  if (!axis.finite() || std::abs(norm(axis) - 1.0) > 1e-9) {
    throw ArgumentError("rotation axis must be a unit vector");
  }
  if (!std::isfinite(degrees)) {
    throw ArgumentError("rotation angle must be finite");
  }
  const auto [s, c] = sin_cos_degrees(degrees);
  const Point3& k = axis;
  // Row-major rotation matrix from the Rodrigues formula.
  const double t = 1.0 - c;
  const double m[3][3] = {
      {c + k.x * k.x * t, k.x * k.y * t - k.z * s, k.x * k.z * t + k.y * s},
      {k.y * k.x * t + k.z * s, c + k.y * k.y * t, k.y * k.z * t - k.x * s},
      {k.z * k.x * t - k.y * s, k.z * k.y * t + k.x * s, c + k.z * k.z * t},
  };
  PointCloud out = cloud;
  for (auto& p : out.points) {
    const Point3 v = p;
    p = {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
         m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
         m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  return out;
}

PerturbationKind parse_perturbation_kind(std::string_view name) {
  if (name == "jitter") return PerturbationKind::jitter;
  if (name == "scale") return PerturbationKind::scale;
  if (name == "translate") return PerturbationKind::translate;
  if (name == "rotate") return PerturbationKind::rotate;
  throw ArgumentError("unknown perturbation kind '" + std::string(name) + "'");
}

void PerturbationSpec::validate() const {
  switch (kind) {
    case PerturbationKind::jitter:
      if (!(fraction >= 0.0 && fraction <= 1.0)) throw ArgumentError("jitter fraction must lie in [0, 1]");
      if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ArgumentError("jitter sigma must be positive");
      break;
    case PerturbationKind::scale:
      if (!(factor > 0.0) || !std::isfinite(factor)) throw ArgumentError("scale factor must be positive");
      break;
    case PerturbationKind::translate:
      if (!offset.finite()) throw ArgumentError("translation offset must be finite");
      break;
    case PerturbationKind::rotate:
      if (!axis.finite() || std::abs(norm(axis) - 1.0) > 1e-9) {
        throw ArgumentError("rotation axis must be a unit vector");
      }
      if (!std::isfinite(degrees)) throw ArgumentError("rotation angle must be finite");
      break;
  }
}

std::string PerturbationSpec::describe() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  switch (kind) {
    case PerturbationKind::jitter:
      os << "kind=jitter fraction=" << fraction << " sigma=" << sigma << " seed=" << seed;
      break;
    case PerturbationKind::scale:
      os << "kind=scale factor=" << factor;
      break;
    case PerturbationKind::translate:
      os << "kind=translate offset=" << offset.x << ',' << offset.y << ',' << offset.z;
      break;
    case PerturbationKind::rotate:
      os << "kind=rotate axis=" << axis.x << ',' << axis.y << ',' << axis.z << " degrees=" << degrees;
      break;
  }
  return os.str();
}

PointCloud apply_perturbation(const PointCloud& cloud, const PerturbationSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PerturbationKind::jitter: return jitter(cloud, spec.fraction, spec.sigma, spec.seed);
    case PerturbationKind::scale: return scale(cloud, spec.factor);
    case PerturbationKind::translate: return translate(cloud, spec.offset);
    case PerturbationKind::rotate: return rotate(cloud, spec.axis, spec.degrees);
  }
  throw ContractViolation("unhandled perturbation kind");
}

ShapeKind parse_shape_kind(std::string_view name) {
  if (name == "sphere") return ShapeKind::sphere;
  if (name == "torus") return ShapeKind::torus;
  if (name == "cube_corners") return ShapeKind::cube_corners;
  if (name == "circle") return ShapeKind::circle;
  throw ArgumentError("unknown shape '" + std::string(name) + "'");
}

namespace {

// Generator of the rank-1 lattice {(i/n, i*g/n mod 1)} on a flat torus of
// aspect `aspect`:1 whose shortest nonzero vector is longest.
std::size_t torus_lattice_generator(std::size_t n, double aspect) {
  if (n < 3) return 1;
  std::size_t best = 1;
  double best_len = -1.0;
  const double nd = static_cast<double>(n);
  for (std::size_t g = 1; g < n; ++g) {
    double shortest = INFINITY;
    for (std::size_t i = 1; i < n && shortest > best_len; ++i) {
      const double a = std::min(static_cast<double>(i), nd - static_cast<double>(i)) / nd * aspect;
      const std::size_t r = i * g % n;
      const double b = std::min(static_cast<double>(r), nd - static_cast<double>(r)) / nd;
      shortest = std::min(shortest, a * a + b * b);
    }
    if (shortest > best_len) {
      best_len = shortest;
      best = g;
    }
  }
  return best;
}

}  // namespace

PointCloud synth_shape(ShapeKind shape, std::size_t n, std::uint64_t seed, const ShapeParams& params) {
  if (n == 0) {
    throw ArgumentError("synthetic shapes need at least one point");
  }
  PointCloud out;
  detail::Rng rng(seed);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  switch (shape) {
    case ShapeKind::sphere: {
      if (!(params.radius > 0.0)) throw ArgumentError("sphere radius must be positive");
      out.id = "sphere";
      out.points.reserve(n);
      while (out.points.size() < n) {
        const Point3 g{rng.normal(), rng.normal(), rng.normal()};
        const double len = norm(g);
        if (len < 1e-12) continue;
        out.points.push_back((params.radius / len) * g);
      }
      break;
    }
    case ShapeKind::torus: {
      if (!(params.minor > 0.0) || !(params.major > params.minor)) {
        throw ArgumentError("torus needs major > minor > 0");
      }
      out.id = "torus";
      out.points.reserve(n);
      const double big = params.major;
      const double small = params.minor;
      // Rank-1 lattice (i/n, i*g/n) on the flat torus, with the generator g
      // maximizing the shortest lattice vector; the second coordinate is
      // mapped through the inverse area CDF. The seed shifts the lattice.
      const std::size_t g = torus_lattice_generator(n, big / small);
      const double shift_u = rng.uniform();
      const double shift_v = rng.uniform();
      const double nd = static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = std::fmod(static_cast<double>(i * g % n) / nd + shift_v, 1.0);
        const double target = two_pi * big * t;
        double v = t * two_pi;
        for (int it = 0; it < 50; ++it) {
          const double step = (big * v + small * std::sin(v) - target) / (big + small * std::cos(v));
          v -= step;
          if (std::abs(step) < 1e-15) break;
        }
        const double u = two_pi * std::fmod(static_cast<double>(i) / nd + shift_u, 1.0);
        const double ring = big + small * std::cos(v);
        out.points.push_back({ring * std::cos(u), ring * std::sin(u), small * std::sin(v)});
      }
      break;
    }
    case ShapeKind::cube_corners: {
      if (!(params.side > 0.0)) throw ArgumentError("cube side must be positive");
      out.id = "cube_corners";
      const double h = params.side / 2.0;
      for (int i = 0; i < 8; ++i) {
        out.points.push_back({(i & 4) ? h : -h, (i & 2) ? h : -h, (i & 1) ? h : -h});
      }
      break;
    }
    case ShapeKind::circle: {
      if (!(params.radius > 0.0)) throw ArgumentError("circle radius must be positive");
      out.id = "circle";
      out.points.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = two_pi * rng.uniform();
        out.points.push_back({params.radius * std::cos(t), params.radius * std::sin(t), 0.0});
      }
      break;
    }
  }
  out.source = "synth:" + out.id;
  return out;
}

}  // namespace tdacloud
