#include "tdacloud/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "tdacloud/errors.hpp"
#include "tdacloud/predicates.hpp"

namespace tdacloud {
namespace {

constexpr std::int32_t kInfinite = -1;

struct Cell {
  std::array<std::int32_t, 4> v;  // vertex opposite facet i
  std::array<std::int32_t, 4> n;  // neighbor across facet i
};

// 63-bit Morton code of a point quantized to the bounding box.
std::vector<std::int32_t> spatial_order(std::span<const Point3> pts) {
  Point3 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  auto quantize = [](double v, double l, double h) -> std::uint64_t {
    if (!(h > l)) return 0;
    const double t = (v - l) / (h - l);
    return static_cast<std::uint64_t>(std::clamp(t, 0.0, 1.0) * 2097151.0);
  };
  auto spread = [](std::uint64_t x) {
    x &= 0x1fffff;
    x = (x | x << 32) & 0x1f00000000ffffULL;
    x = (x | x << 16) & 0x1f0000ff0000ffULL;
    x = (x | x << 8) & 0x100f00f00f00f00fULL;
    x = (x | x << 4) & 0x10c30c30c30c30c3ULL;
    x = (x | x << 2) & 0x1249249249249249ULL;
    return x;
  };
  std::vector<std::pair<std::uint64_t, std::int32_t>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    keyed[i] = {spread(quantize(p.x, lo.x, hi.x)) | spread(quantize(p.y, lo.y, hi.y)) << 1 |
                    spread(quantize(p.z, lo.z, hi.z)) << 2,
                static_cast<std::int32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::int32_t> order(pts.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;
  return order;
}

class Triangulation {
 public:
  explicit Triangulation(std::span<const Point3> pts) : pts_(pts) {}

  void build() {
    if (pts_.size() < 4) {
      throw DegenerateInputError("Delaunay triangulation needs at least 4 distinct points; use the rips backend");
    }
    const auto order = spatial_order(pts_);
    const auto seed = initial_simplex(order);
    for (std::int32_t id : order) {
      if (std::find(seed.begin(), seed.end(), id) != seed.end()) continue;
      insert(id);
    }
  }

  DelaunayMesh finite_cells() const {
    DelaunayMesh mesh;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (!alive_[c]) continue;
      const auto& v = cells_[c].v;
      if (std::find(v.begin(), v.end(), kInfinite) != v.end()) continue;
      mesh.tetrahedra.push_back(v);
    }
    return mesh;
  }

 private:
  const Point3& pt(std::int32_t id) const { return pts_[static_cast<std::size_t>(id)]; }

  static bool collinear(const Point3& a, const Point3& b, const Point3& c) {
    // cross(b - a, c - a) vanishes iff its dot with three independent
    // directions does.
    const Point3 dx{a.x + 1.0, a.y, a.z}, dy{a.x, a.y + 1.0, a.z}, dz{a.x, a.y, a.z + 1.0};
    return predicates::orient3d(a, b, c, dx) == 0 && predicates::orient3d(a, b, c, dy) == 0 &&
           predicates::orient3d(a, b, c, dz) == 0;
  }

  std::array<std::int32_t, 4> initial_simplex(const std::vector<std::int32_t>& order) {
    const std::int32_t a = order[0], b = order[1];
    std::int32_t c = kInfinite, d = kInfinite;
    std::size_t k = 2;
    for (; k < order.size(); ++k) {
      if (!collinear(pt(a), pt(b), pt(order[k]))) {
        c = order[k];
        break;
      }
    }
    if (c == kInfinite) {
      throw DegenerateInputError("all points are collinear; use the rips backend");
    }
    int o = 0;
    for (++k; k < order.size(); ++k) {
      o = predicates::orient3d(pt(a), pt(b), pt(c), pt(order[k]));
      if (o != 0) {
        d = order[k];
        break;
      }
    }
    if (d == kInfinite) {
      throw DegenerateInputError("all points are coplanar; use the rips backend");
    }
    std::array<std::int32_t, 4> v{a, b, c, d};
    if (o < 0) std::swap(v[0], v[1]);

    cells_.push_back({v, {1, 2, 3, 4}});
    alive_.push_back(1);
    for (int i = 0; i < 4; ++i) {
      Cell inf{v, {-1, -1, -1, -1}};
      inf.v[i] = kInfinite;
      // Odd permutation of the finite vertices so that substituting an
      // outside point for the infinite vertex is positively oriented.
      std::swap(inf.v[(i + 1) % 4], inf.v[(i + 2) % 4]);
      inf.n[i] = 0;
      cells_.push_back(inf);
      alive_.push_back(1);
    }
    link_by_facets({1, 2, 3, 4});
    last_ = 0;
    return {a, b, c, d};
  }

  static std::uint64_t edge_key(std::int32_t u, std::int32_t w) {
    if (u > w) std::swap(u, w);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(w);
  }

  // Links facets containing the infinite vertex among a set of fresh cells.
  void link_by_facets(const std::vector<std::int32_t>& fresh) {
    std::unordered_map<std::uint64_t, std::pair<std::int32_t, int>> open;
    for (std::int32_t c : fresh) {
      auto& cell = cells_[static_cast<std::size_t>(c)];
      const int k = static_cast<int>(std::find(cell.v.begin(), cell.v.end(), kInfinite) - cell.v.begin());
      for (int j = 0; j < 4; ++j) {
        if (j == k) continue;
        std::int32_t a = kInfinite, b = kInfinite;
        for (int t = 0; t < 4; ++t) {
          if (t == j || t == k) continue;
          (a == kInfinite ? a : b) = cell.v[t];
        }
        const auto key = edge_key(a, b);
        auto it = open.find(key);
        if (it == open.end()) {
          open.emplace(key, std::make_pair(c, j));
        } else {
          cell.n[j] = it->second.first;
          cells_[static_cast<std::size_t>(it->second.first)].n[it->second.second] = c;
          open.erase(it);
        }
      }
    }
  }

  // Orientation of cell c with vertex slot i replaced by point p.
  int orient_sub(const Cell& c, int i, const Point3& p) const {
    const Point3* q[4];
    for (int t = 0; t < 4; ++t) q[t] = (t == i) ? &p : &pt(c.v[t]);
    return predicates::orient3d(*q[0], *q[1], *q[2], *q[3]);
  }

  bool in_conflict(const Cell& c, std::int32_t pid) const {
    const Point3& p = pt(pid);
    const auto inf = std::find(c.v.begin(), c.v.end(), kInfinite);
    if (inf == c.v.end()) {
      const int s = predicates::insphere(pt(c.v[0]), pt(c.v[1]), pt(c.v[2]), pt(c.v[3]), p);
      if (s != 0) return s > 0;
      return perturbed_insphere(c, pid);
    }
    const int k = static_cast<int>(inf - c.v.begin());
    const int o = orient_sub(c, k, p);
    if (o != 0) return o > 0;
    std::array<std::int32_t, 3> f{};
    for (int t = 0, u = 0; t < 4; ++t) {
      if (t != k) f[static_cast<std::size_t>(u++)] = c.v[t];
    }
    const int s = predicates::coplanar_incircle(pt(f[0]), pt(f[1]), pt(f[2]), p);
    if (s != 0) return s > 0;
    return perturbed_incircle(f, pid);
  }

  // Cospherical tie: lift each point by an infinitesimal that grows with
  // its index. The leading nonzero term decides the side.
  bool perturbed_insphere(const Cell& c, std::int32_t pid) const {
    std::array<std::int32_t, 5> ids{c.v[0], c.v[1], c.v[2], c.v[3], pid};
    std::sort(ids.begin(), ids.end());
    for (int i = 4; i > 2; --i) {
      const std::int32_t x = ids[static_cast<std::size_t>(i)];
      if (x == pid) return false;
      const int slot = static_cast<int>(std::find(c.v.begin(), c.v.end(), x) - c.v.begin());
      const int o = orient_sub(c, slot, pt(pid));
      if (o != 0) return o > 0;
    }
    throw ContractViolation("symbolic perturbation failed to resolve a cospherical configuration");
  }

  bool perturbed_incircle(const std::array<std::int32_t, 3>& f, std::int32_t pid) const {
    std::array<std::int32_t, 4> ids{f[0], f[1], f[2], pid};
    std::sort(ids.begin(), ids.end());
    const Point3& p = pt(pid);
    const Point3 &p0 = pt(f[0]), &p1 = pt(f[1]), &p2 = pt(f[2]);
    for (int i = 3; i > 0; --i) {
      const std::int32_t x = ids[static_cast<std::size_t>(i)];
      if (x == pid) return false;
      int o = 0;
      if (x == f[2]) o = predicates::coplanar_same_side(p0, p1, p, p2);
      else if (x == f[1]) o = predicates::coplanar_same_side(p0, p2, p, p1);
      else o = predicates::coplanar_same_side(p1, p2, p, p0);
      if (o != 0) return o > 0;
    }
    return false;
  }

  std::int32_t locate(std::int32_t pid) {
    const Point3& p = pt(pid);
    std::int32_t c = last_;
    if (!alive_[static_cast<std::size_t>(c)]) {
      c = static_cast<std::int32_t>(std::find(alive_.begin(), alive_.end(), 1) - alive_.begin());
    }
    const std::size_t limit = 4 * cells_.size() + 64;
    for (std::size_t step = 0; step < limit; ++step) {
      const Cell& cell = cells_[static_cast<std::size_t>(c)];
      const auto inf = std::find(cell.v.begin(), cell.v.end(), kInfinite);
      if (inf != cell.v.end()) {
        if (in_conflict(cell, pid)) return c;
        if (step > 0) break;
        c = cell.n[static_cast<std::size_t>(inf - cell.v.begin())];
        continue;
      }
      const int start = static_cast<int>(walk_rotation_++ & 3);
      bool moved = false;
      for (int t = 0; t < 4; ++t) {
        const int i = (start + t) & 3;
        if (orient_sub(cell, i, p) < 0) {
          c = cell.n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return c;
    }
    // The visibility walk did not settle; scan for any conflicting cell.
    for (std::size_t k = 0; k < cells_.size(); ++k) {
      if (alive_[k] && in_conflict(cells_[k], pid)) return static_cast<std::int32_t>(k);
    }
    throw ContractViolation("point location failed during Delaunay insertion");
  }

  std::int32_t allocate(const Cell& cell) {
    if (!free_.empty()) {
      const std::int32_t id = free_.back();
      free_.pop_back();
      cells_[static_cast<std::size_t>(id)] = cell;
      alive_[static_cast<std::size_t>(id)] = 1;
      return id;
    }
    cells_.push_back(cell);
    alive_.push_back(1);
    return static_cast<std::int32_t>(cells_.size() - 1);
  }

  struct PendingCell {
    Cell cell;
    std::int32_t outside;
    int back_slot;
  };

  void insert(std::int32_t pid) {
    const std::int32_t start = locate(pid);
    mark_.resize(cells_.size(), 0);
    state_.resize(cells_.size(), 0);
    ++stamp_;

    // Conflict region by flood fill; record boundary facets.
    conflict_.clear();
    pending_.clear();
    stack_.clear();
    stack_.push_back(start);
    mark_[static_cast<std::size_t>(start)] = stamp_;
    state_[static_cast<std::size_t>(start)] = 1;
    while (!stack_.empty()) {
      const std::int32_t c = stack_.back();
      stack_.pop_back();
      conflict_.push_back(c);
      for (int i = 0; i < 4; ++i) {
        const std::int32_t nb = cells_[static_cast<std::size_t>(c)].n[i];
        const auto nbi = static_cast<std::size_t>(nb);
        if (mark_[nbi] != stamp_) {
          mark_[nbi] = stamp_;
          state_[nbi] = in_conflict(cells_[nbi], pid) ? 1 : 2;
          if (state_[nbi] == 1) stack_.push_back(nb);
        }
        if (state_[nbi] == 2) {
          Cell cell = cells_[static_cast<std::size_t>(c)];
          cell.v[i] = pid;
          cell.n = {-1, -1, -1, -1};
          cell.n[i] = nb;
          const auto& back = cells_[nbi].n;
          const int slot = static_cast<int>(std::find(back.begin(), back.end(), c) - back.begin());
          pending_.push_back({cell, nb, slot});
        }
      }
    }

    // Star the cavity boundary from the new point, reusing freed slots.
    for (std::int32_t c : conflict_) {
      alive_[static_cast<std::size_t>(c)] = 0;
      free_.push_back(c);
    }
    fresh_.clear();
    for (const auto& pending : pending_) {
      const std::int32_t id = allocate(pending.cell);
      cells_[static_cast<std::size_t>(pending.outside)].n[pending.back_slot] = id;
      fresh_.push_back(id);
    }

    horizon_.clear();
    for (std::int32_t id : fresh_) {
      auto& cell = cells_[static_cast<std::size_t>(id)];
      const int pslot = static_cast<int>(std::find(cell.v.begin(), cell.v.end(), pid) - cell.v.begin());
      for (int j = 0; j < 4; ++j) {
        if (j == pslot) continue;
        std::int32_t a = 0, b = 0;
        bool first = true;
        for (int t = 0; t < 4; ++t) {
          if (t == j || t == pslot) continue;
          (first ? a : b) = cell.v[t];
          first = false;
        }
        const auto key = edge_key(a, b);
        auto [it, inserted] = horizon_.try_emplace(key, id, j);
        if (!inserted) {
          cell.n[j] = it->second.first;
          cells_[static_cast<std::size_t>(it->second.first)].n[it->second.second] = id;
          horizon_.erase(it);
        }
      }
    }
    if (!horizon_.empty()) {
      throw ContractViolation("Delaunay cavity boundary is not a closed surface");
    }
    last_ = fresh_.front();
  }

  std::span<const Point3> pts_;
  std::vector<Cell> cells_;
  std::vector<char> alive_;
  std::vector<std::int32_t> free_;
  std::vector<std::uint32_t> mark_;
  std::vector<std::uint8_t> state_;
  std::uint32_t stamp_ = 0;
  std::int32_t last_ = 0;
  std::uint64_t walk_rotation_ = 0;

  std::vector<std::int32_t> conflict_, stack_, fresh_;
  std::vector<PendingCell> pending_;
  std::unordered_map<std::uint64_t, std::pair<std::int32_t, int>> horizon_;
};

}  // namespace

DelaunayMesh delaunay3d(std::span<const Point3> points) {
  Triangulation tri(points);
  tri.build();
  return tri.finite_cells();
}

}  // namespace tdacloud
