#include "tdacloud/persistence.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "simplex_key.hpp"
#include "tdacloud/errors.hpp"
#include "tdacloud/text_format.hpp"

namespace tdacloud {
namespace {

using Column = std::vector<std::int64_t>;

// Boundary columns as ascending face positions. Also checks the
// faces-before-cofaces contract.
std::vector<Column> boundary_columns(const Filtration& filtration, int top_dim) {
  const auto& simplices = filtration.simplices;
  std::unordered_map<std::array<std::int32_t, 4>, std::int64_t, detail::SimplexKeyHash> position;
  position.reserve(simplices.size());
  std::vector<Column> columns(simplices.size());
  for (std::size_t pos = 0; pos < simplices.size(); ++pos) {
    const Simplex& s = simplices[pos];
    if (s.dim > top_dim) continue;
    if (s.dim > 0) {
      Column& col = columns[pos];
      col.reserve(s.size());
      for (int skip = 0; skip <= s.dim; ++skip) {
        std::array<std::int32_t, 4> face{-1, -1, -1, -1};
        for (int t = 0, u = 0; t <= s.dim; ++t) {
          if (t != skip) face[static_cast<std::size_t>(u++)] = s.vertices[static_cast<std::size_t>(t)];
        }
        auto it = position.find(face);
        if (it == position.end()) {
          throw ContractViolation("filtration position " + std::to_string(pos) + " precedes one of its faces");
        }
        col.push_back(it->second);
      }
      std::sort(col.begin(), col.end());
    }
    position.emplace(s.vertices, static_cast<std::int64_t>(pos));
  }
  return columns;
}

// target += source over GF(2); both ascending.
void add_column(Column& target, const Column& source, Column& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace

std::vector<PositionPair> persistence_pairs(const Filtration& filtration, int max_hom_dim) {
  if (max_hom_dim < 0 || max_hom_dim > 2) {
    throw ArgumentError("max homology dimension must lie in 0..2");
  }
  const auto& simplices = filtration.simplices;
  const int top_dim = max_hom_dim + 1;
  std::vector<Column> columns = boundary_columns(filtration, top_dim);

  const std::size_t m = simplices.size();
  std::vector<std::int64_t> pivot_owner(m, -1);  // row -> column whose lowest one it is
  std::vector<char> cleared(m, 0);
  std::vector<char> is_death(m, 0);
  Column scratch;

  // Twist: reduce top dimension first so that every pivot found clears a
  // column one dimension down before it is visited.
  for (int d = top_dim; d >= 1; --d) {
    for (std::size_t j = 0; j < m; ++j) {
      if (simplices[j].dim != d) continue;
      Column& col = columns[j];
      if (cleared[j]) {
        col.clear();
        continue;
      }
      while (!col.empty()) {
        const std::int64_t low = col.back();
        const std::int64_t owner = pivot_owner[static_cast<std::size_t>(low)];
        if (owner < 0) break;
        add_column(col, columns[static_cast<std::size_t>(owner)], scratch);
      }
      if (!col.empty()) {
        const auto low = static_cast<std::size_t>(col.back());
        pivot_owner[low] = static_cast<std::int64_t>(j);
        cleared[low] = 1;
        is_death[j] = 1;
      }
    }
  }

  std::vector<PositionPair> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    const int dim = simplices[i].dim;
    if (dim > max_hom_dim) continue;
    if (pivot_owner[i] >= 0) {
      pairs.push_back({static_cast<std::int64_t>(i), pivot_owner[i], dim});
    } else if (!is_death[i]) {
      pairs.push_back({static_cast<std::int64_t>(i), -1, dim});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const PositionPair& a, const PositionPair& b) {
    return std::tie(a.birth, a.death, a.dim) < std::tie(b.birth, b.death, b.dim);
  });
  return pairs;
}

PersistenceSet compute_persistence(const Filtration& filtration, int max_hom_dim) {
  PersistenceSet pset;
  pset.convention = filtration.convention;
  pset.max_hom_dim = max_hom_dim;
  for (const auto& p : persistence_pairs(filtration, max_hom_dim)) {
    const double birth = filtration.simplices[static_cast<std::size_t>(p.birth)].value;
    const double death = p.death < 0 ? kInfinity : filtration.simplices[static_cast<std::size_t>(p.death)].value;
    if (death == birth) continue;
    pset.by_dim[static_cast<std::size_t>(p.dim)].push_back({p.dim, birth, death});
  }
  for (auto& list : pset.by_dim) {
    std::sort(list.begin(), list.end(), [](const BirthDeathPair& a, const BirthDeathPair& b) {
      return a.birth != b.birth ? a.birth < b.birth : a.death < b.death;
    });
  }
  return pset;
}

SelectedDiagram select_diagram(const PersistenceSet& pset) {
  auto finite = [&](int dim) {
    std::vector<BirthDeathPair> out;
    for (const auto& p : pset[dim]) {
      if (!p.infinite()) out.push_back(p);
    }
    return out;
  };
  for (int dim = 2; dim >= 1; --dim) {
    auto pairs = finite(dim);
    if (pairs.size() >= 2) return {dim, std::move(pairs)};
  }
  return {0, finite(0)};
}

void write_diagram_csv(std::ostream& out, const PersistenceSet& pset) {
  out << "dim,birth,death\n";
  for (const auto& list : pset.by_dim) {
    for (const auto& p : list) {
      out << p.dim << ',' << format_double(p.birth) << ',' << format_double(p.death) << '\n';
    }
  }
}

std::string diagram_to_text(const PersistenceSet& pset) {
  std::ostringstream os;
  write_diagram_csv(os, pset);
  return os.str();
}

}  // namespace tdacloud
