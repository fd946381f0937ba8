#include "tdacloud/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "simplex_key.hpp"
#include "tdacloud/delaunay.hpp"
#include "tdacloud/errors.hpp"
#include "tdacloud/text_format.hpp"

namespace tdacloud {

std::string_view to_string(Backend backend) { return backend == Backend::rips ? "rips" : "alpha"; }

std::string_view to_string(ValueConvention convention) {
  return convention == ValueConvention::distance ? "distance" : "squared_radius";
}

Backend parse_backend(std::string_view name) {
  if (name == "rips") return Backend::rips;
  if (name == "alpha") return Backend::alpha;
  throw ArgumentError("unknown backend '" + std::string(name) + "' (expected rips or alpha)");
}

ValueConvention parse_convention(std::string_view name) {
  if (name == "distance") return ValueConvention::distance;
  if (name == "squared_radius") return ValueConvention::squared_radius;
  throw ArgumentError("unknown value convention '" + std::string(name) + "'");
}

bool filtration_less(const Simplex& a, const Simplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return a.vertices < b.vertices;
}

namespace {

Simplex make_simplex(std::initializer_list<std::int32_t> ids, double value) {
  Simplex s;
  std::size_t k = 0;
  for (auto id : ids) s.vertices[k++] = id;
  std::sort(s.vertices.begin(), s.vertices.begin() + static_cast<std::ptrdiff_t>(k));
  s.dim = static_cast<int>(k) - 1;
  s.value = value;
  return s;
}

void sort_filtration(std::vector<Simplex>& simplices) {
  std::sort(simplices.begin(), simplices.end(), filtration_less);
}

}  // namespace

// ---------------------------------------------------------------------------
// Vietoris-Rips

Filtration build_rips(const PointCloud& cloud, const RipsOptions& options) {
  validate_cloud(cloud);
  if (options.max_dim < 0 || options.max_dim > 3) {
    throw ArgumentError("rips max_dim must lie in 0..3");
  }
  if (options.threshold && !(*options.threshold > 0.0)) {
    throw ArgumentError("rips threshold must be positive");
  }
  const std::size_t n = cloud.size();
  const auto& pts = cloud.points;

  std::vector<double> dist(n * n, 0.0);
  double diameter = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(pts[i], pts[j]));
      dist[i * n + j] = dist[j * n + i] = d;
      diameter = std::max(diameter, d);
    }
  }
  const double threshold = options.threshold.value_or(diameter);
  auto adjacent = [&](std::size_t i, std::size_t j) { return dist[i * n + j] <= threshold; };

  Filtration f;
  f.backend = Backend::rips;
  f.convention = ValueConvention::distance;
  f.num_points = n;
  auto push = [&](Simplex s) {
    if (f.simplices.size() >= options.simplex_cap) {
      throw ResourceError("rips complex exceeds the simplex cap of " + std::to_string(options.simplex_cap) +
                          "; lower max_dim, set a threshold, or downsample the cloud");
    }
    f.simplices.push_back(s);
  };

  for (std::size_t i = 0; i < n; ++i) {
    push(make_simplex({static_cast<std::int32_t>(i)}, 0.0));
  }
  // Higher-index neighbours, for clique enumeration without repeats.
  std::vector<std::vector<std::int32_t>> up(n);
  if (options.max_dim >= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!adjacent(i, j)) continue;
        up[i].push_back(static_cast<std::int32_t>(j));
        push(make_simplex({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)}, dist[i * n + j]));
      }
    }
  }
  if (options.max_dim >= 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::int32_t j : up[i]) {
        for (std::int32_t k : up[static_cast<std::size_t>(j)]) {
          const auto ku = static_cast<std::size_t>(k);
          if (!adjacent(i, ku)) continue;
          const double v3 = std::max({dist[i * n + static_cast<std::size_t>(j)], dist[i * n + ku],
                                      dist[static_cast<std::size_t>(j) * n + ku]});
          push(make_simplex({static_cast<std::int32_t>(i), j, k}, v3));
          if (options.max_dim < 3) continue;
          for (std::int32_t l : up[ku]) {
            const auto lu = static_cast<std::size_t>(l);
            if (!adjacent(i, lu) || !adjacent(static_cast<std::size_t>(j), lu)) continue;
            const double v4 = std::max({v3, dist[i * n + lu], dist[static_cast<std::size_t>(j) * n + lu],
                                        dist[ku * n + lu]});
            push(make_simplex({static_cast<std::int32_t>(i), j, k, l}, v4));
          }
        }
      }
    }
  }
  sort_filtration(f.simplices);
  return f;
}

// ---------------------------------------------------------------------------
// Alpha

namespace {

double tet_squared_radius(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const Point3 u = b - a, v = c - a, w = d - a;
  const double den = 2.0 * dot(u, cross(v, w));
  const Point3 num = dot(u, u) * cross(v, w) + dot(v, v) * cross(w, u) + dot(w, w) * cross(u, v);
  return dot(num, num) / (den * den);
}

// Center offset from `a` of the smallest sphere through a, b, c.
Point3 triangle_center_offset(const Point3& a, const Point3& b, const Point3& c) {
  const Point3 u = b - a, v = c - a;
  const Point3 nrm = cross(u, v);
  const double den = 2.0 * dot(nrm, nrm);
  const Point3 num = dot(u, u) * cross(v, nrm) + dot(v, v) * cross(nrm, u);
  return (1.0 / den) * num;
}

struct CofacetRecord {
  std::array<std::int32_t, 3> face;  // sorted; unused slot = -1
  double cofacet_value;
  std::int32_t opposite;
};

bool record_less(const CofacetRecord& a, const CofacetRecord& b) {
  if (a.face != b.face) return a.face < b.face;
  if (a.cofacet_value != b.cofacet_value) return a.cofacet_value < b.cofacet_value;
  return a.opposite < b.opposite;
}

// Groups records by face and assigns each face its alpha value: the
// smallest cofacet value when some cofacet vertex lies strictly inside the
// face's smallest circumsphere, otherwise that sphere's squared radius.
template <typename OwnBall>
std::vector<std::pair<std::array<std::int32_t, 3>, double>> assign_faces(std::vector<CofacetRecord>& records,
                                                                         std::span<const Point3> pts,
                                                                         OwnBall own_ball) {
  std::sort(records.begin(), records.end(), record_less);
  std::vector<std::pair<std::array<std::int32_t, 3>, double>> faces;
  for (std::size_t lo = 0; lo < records.size();) {
    std::size_t hi = lo;
    while (hi < records.size() && records[hi].face == records[lo].face) ++hi;
    const auto& face = records[lo].face;
    const auto [center, r2] = own_ball(face);
    bool attached = false;
    for (std::size_t k = lo; k < hi && !attached; ++k) {
      attached = squared_distance(pts[static_cast<std::size_t>(records[k].opposite)], center) < r2;
    }
    faces.emplace_back(face, attached ? records[lo].cofacet_value : r2);
    lo = hi;
  }
  return faces;
}

}  // namespace

Filtration build_alpha(const PointCloud& cloud) {
  validate_cloud(cloud);
  const std::size_t n_in = cloud.size();

  // Merge coincident points, keeping the lowest original index.
  std::vector<std::int32_t> by_point(n_in);
  std::iota(by_point.begin(), by_point.end(), 0);
  std::stable_sort(by_point.begin(), by_point.end(), [&](std::int32_t a, std::int32_t b) {
    return cloud.points[static_cast<std::size_t>(a)] < cloud.points[static_cast<std::size_t>(b)];
  });
  std::vector<char> keep(n_in, 0);
  for (std::size_t k = 0; k < n_in; ++k) {
    if (k == 0 || cloud.points[static_cast<std::size_t>(by_point[k])] !=
                      cloud.points[static_cast<std::size_t>(by_point[k - 1])]) {
      keep[static_cast<std::size_t>(by_point[k])] = 1;
    }
  }
  std::vector<std::int32_t> original;  // local id -> cloud index
  std::vector<Point3> pts;
  for (std::size_t i = 0; i < n_in; ++i) {
    if (!keep[i]) continue;
    original.push_back(static_cast<std::int32_t>(i));
    pts.push_back(cloud.points[i]);
  }

  const DelaunayMesh mesh = delaunay3d(pts);

  std::vector<Simplex> simplices;
  simplices.reserve(pts.size() + mesh.tetrahedra.size() * 7);

  // Tetrahedra and their facets.
  std::vector<CofacetRecord> tri_records;
  tri_records.reserve(mesh.tetrahedra.size() * 4);
  for (auto tet : mesh.tetrahedra) {
    std::sort(tet.begin(), tet.end());
    const auto P = [&](int k) -> const Point3& { return pts[static_cast<std::size_t>(tet[static_cast<std::size_t>(k)])]; };
    const double value = tet_squared_radius(P(0), P(1), P(2), P(3));
    simplices.push_back(make_simplex({tet[0], tet[1], tet[2], tet[3]}, value));
    for (int skip = 0; skip < 4; ++skip) {
      CofacetRecord r{{-1, -1, -1}, value, tet[static_cast<std::size_t>(skip)]};
      for (int t = 0, u = 0; t < 4; ++t) {
        if (t != skip) r.face[static_cast<std::size_t>(u++)] = tet[static_cast<std::size_t>(t)];
      }
      tri_records.push_back(r);
    }
  }

  const auto triangles = assign_faces(tri_records, pts, [&](const std::array<std::int32_t, 3>& f) {
    const Point3& a = pts[static_cast<std::size_t>(f[0])];
    const Point3 off = triangle_center_offset(a, pts[static_cast<std::size_t>(f[1])], pts[static_cast<std::size_t>(f[2])]);
    return std::make_pair(a + off, dot(off, off));
  });
  tri_records.clear();
  tri_records.shrink_to_fit();

  std::vector<CofacetRecord> edge_records;
  edge_records.reserve(triangles.size() * 3);
  for (const auto& [f, value] : triangles) {
    simplices.push_back(make_simplex({f[0], f[1], f[2]}, value));
    edge_records.push_back({{f[0], f[1], -1}, value, f[2]});
    edge_records.push_back({{f[0], f[2], -1}, value, f[1]});
    edge_records.push_back({{f[1], f[2], -1}, value, f[0]});
  }
  const auto edges = assign_faces(edge_records, pts, [&](const std::array<std::int32_t, 3>& e) {
    const Point3& a = pts[static_cast<std::size_t>(e[0])];
    const Point3& b = pts[static_cast<std::size_t>(e[1])];
    return std::make_pair(0.5 * (a + b), 0.25 * squared_distance(a, b));
  });
  for (const auto& [e, value] : edges) {
    simplices.push_back(make_simplex({e[0], e[1]}, value));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    simplices.push_back(make_simplex({static_cast<std::int32_t>(i)}, 0.0));
  }

  // Rounding can leave a coface a hair below a face whose value is equal in
  // exact arithmetic; lift cofaces so the filtration stays monotone.
  std::unordered_map<std::array<std::int32_t, 4>, double, detail::SimplexKeyHash> value_of;
  value_of.reserve(simplices.size());
  std::sort(simplices.begin(), simplices.end(), [](const Simplex& a, const Simplex& b) { return a.dim < b.dim; });
  for (auto& s : simplices) {
    if (s.dim > 1) {
      for (int skip = 0; skip <= s.dim; ++skip) {
        std::array<std::int32_t, 4> face{-1, -1, -1, -1};
        for (int t = 0, u = 0; t <= s.dim; ++t) {
          if (t != skip) face[static_cast<std::size_t>(u++)] = s.vertices[static_cast<std::size_t>(t)];
        }
        s.value = std::max(s.value, value_of.at(face));
      }
    }
    if (s.dim < 3) value_of.emplace(s.vertices, s.value);
  }

  // Back to cloud indices; the map is increasing so vertex order holds.
  for (auto& s : simplices) {
    for (int t = 0; t <= s.dim; ++t) {
      auto& v = s.vertices[static_cast<std::size_t>(t)];
      v = original[static_cast<std::size_t>(v)];
    }
  }

  Filtration f;
  f.backend = Backend::alpha;
  f.convention = ValueConvention::squared_radius;
  f.num_points = n_in;
  f.merged_duplicates = n_in - pts.size();
  f.simplices = std::move(simplices);
  sort_filtration(f.simplices);
  return f;
}

// ---------------------------------------------------------------------------

void validate_filtration(const Filtration& filtration) {
  std::unordered_map<std::array<std::int32_t, 4>, std::size_t, detail::SimplexKeyHash> position;
  position.reserve(filtration.simplices.size());
  for (std::size_t pos = 0; pos < filtration.simplices.size(); ++pos) {
    const Simplex& s = filtration.simplices[pos];
    const std::string where = "simplex at position " + std::to_string(pos);
    if (s.dim < 0 || s.dim > 3) throw ContractViolation(where + " has invalid dimension");
    if (!std::isfinite(s.value) || s.value < 0.0) throw ContractViolation(where + " has an invalid value");
    for (int t = 0; t <= s.dim; ++t) {
      const auto v = s.vertices[static_cast<std::size_t>(t)];
      if (v < 0 || static_cast<std::size_t>(v) >= filtration.num_points) {
        throw ContractViolation(where + " references a vertex outside the cloud");
      }
      if (t > 0 && v <= s.vertices[static_cast<std::size_t>(t - 1)]) {
        throw ContractViolation(where + " has unsorted vertices");
      }
    }
    for (int t = s.dim + 1; t < 4; ++t) {
      if (s.vertices[static_cast<std::size_t>(t)] != -1) throw ContractViolation(where + " has stray vertex slots");
    }
    if (s.dim > 0) {
      for (int skip = 0; skip <= s.dim; ++skip) {
        std::array<std::int32_t, 4> face{-1, -1, -1, -1};
        for (int t = 0, u = 0; t <= s.dim; ++t) {
          if (t != skip) face[static_cast<std::size_t>(u++)] = s.vertices[static_cast<std::size_t>(t)];
        }
        auto it = position.find(face);
        if (it == position.end()) throw ContractViolation(where + " appears before one of its faces");
        if (filtration.simplices[it->second].value > s.value) {
          throw ContractViolation(where + " has a smaller value than one of its faces");
        }
      }
    }
    if (!position.emplace(s.vertices, pos).second) {
      throw ContractViolation(where + " duplicates an earlier simplex");
    }
  }
}

void write_filtration_text(std::ostream& out, const Filtration& filtration) {
  for (const auto& s : filtration.simplices) {
    out << s.dim << ' ' << format_double17(s.value);
    for (int t = 0; t <= s.dim; ++t) out << ' ' << s.vertices[static_cast<std::size_t>(t)];
    out << '\n';
  }
}

}  // namespace tdacloud
