#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "tdacloud/point_cloud.hpp"

namespace tdacloud {

enum class Backend { rips, alpha };

/// What a filtration value measures. Diagrams are only comparable when
/// they share a convention.
enum class ValueConvention {
  distance,        // rips: Euclidean edge length
  squared_radius,  // alpha: squared radius of the smallest empty circumball
};

std::string_view to_string(Backend backend);
std::string_view to_string(ValueConvention convention);
Backend parse_backend(std::string_view name);
ValueConvention parse_convention(std::string_view name);

struct Simplex {
  /// Strictly increasing point indices; slots past `dim` hold -1.
  std::array<std::int32_t, 4> vertices{-1, -1, -1, -1};
  int dim = 0;
  double value = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(dim) + 1; }
  friend bool operator==(const Simplex&, const Simplex&) = default;
};

/// Simplices in filtration order: ascending (value, dim, vertices). A
/// simplex's position is its column in the boundary matrix.
struct Filtration {
  std::vector<Simplex> simplices;
  Backend backend = Backend::rips;
  ValueConvention convention = ValueConvention::distance;
  std::size_t num_points = 0;
  /// Alpha backend only: points dropped because they coincide with an
  /// earlier point.
  std::size_t merged_duplicates = 0;
};

struct RipsOptions {
  int max_dim = 2;
  /// Largest edge length admitted; nullopt means the cloud diameter.
  std::optional<double> threshold;
  std::size_t simplex_cap = 50'000'000;
};

/// Vietoris-Rips filtration. Vertices enter at 0, edges at their length,
/// higher simplices at their longest edge.
Filtration build_rips(const PointCloud& cloud, const RipsOptions& options = {});

/// 3D alpha filtration on the Delaunay tetrahedralization, valued by
/// squared radius. Coincident points are merged first.
Filtration build_alpha(const PointCloud& cloud);

/// Strict ordering used for filtrations.
bool filtration_less(const Simplex& a, const Simplex& b);

/// Throws ContractViolation unless every face of every simplex appears
/// earlier with a value no larger than the simplex's own.
void validate_filtration(const Filtration& filtration);

/// Debug dump: one line per simplex, "dim value v0 v1 ...".
void write_filtration_text(std::ostream& out, const Filtration& filtration);

}  // namespace tdacloud
