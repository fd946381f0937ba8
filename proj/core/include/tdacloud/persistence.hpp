#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "tdacloud/filtration.hpp"

namespace tdacloud {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BirthDeathPair {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;

  bool infinite() const { return death == kInfinity; }
  double persistence() const { return death - birth; }
  friend bool operator==(const BirthDeathPair&, const BirthDeathPair&) = default;
};

/// Birth-death pairs for homology dimensions 0, 1, 2, each list sorted by
/// (birth, death).
struct PersistenceSet {
  std::array<std::vector<BirthDeathPair>, 3> by_dim;
  ValueConvention convention = ValueConvention::distance;
  int max_hom_dim = 2;

  const std::vector<BirthDeathPair>& operator[](int dim) const { return by_dim[static_cast<std::size_t>(dim)]; }
  std::size_t total() const { return by_dim[0].size() + by_dim[1].size() + by_dim[2].size(); }
};

/// A pairing in terms of filtration positions. `death` is -1 for a class
/// that never dies.
struct PositionPair {
  std::int64_t birth = 0;
  std::int64_t death = -1;
  int dim = 0;
  friend bool operator==(const PositionPair&, const PositionPair&) = default;
  friend auto operator<=>(const PositionPair&, const PositionPair&) = default;
};

/// Standard persistence pairing of the filtration's boundary matrix over
/// GF(2) (column reduction with clearing), including zero-length pairs.
/// Sorted by (birth, death, dim).
std::vector<PositionPair> persistence_pairs(const Filtration& filtration, int max_hom_dim = 2);

/// Value-level diagram. Pairs with death == birth are dropped.
PersistenceSet compute_persistence(const Filtration& filtration, int max_hom_dim = 2);

/// The diagram that represents a cloud: dimension 2 when it has at least
/// two finite pairs, else dimension 1 under the same rule, else dimension 0.
/// Infinite pairs are stripped before counting.
struct SelectedDiagram {
  int dim = 0;
  std::vector<BirthDeathPair> pairs;
};

SelectedDiagram select_diagram(const PersistenceSet& pset);

/// CSV: header "dim,birth,death", then one row per pair in dimension order.
std::string diagram_to_text(const PersistenceSet& pset);
void write_diagram_csv(std::ostream& out, const PersistenceSet& pset);

}  // namespace tdacloud
