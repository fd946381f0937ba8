#include "tdacloud/predicates.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>

namespace tdacloud::predicates {
namespace {

constexpr double kEpsilon = 0x1.0p-53;
constexpr double kOrientBound = (7.0 + 56.0 * kEpsilon) * kEpsilon;
constexpr double kInsphereBound = (16.0 + 224.0 * kEpsilon) * kEpsilon;

thread_local unsigned long long g_exact_calls = 0;

// Coordinates scaled by a common power of two so every value is an integer.
// All predicates below are homogeneous, so the scaling keeps their signs.
struct ExactPoint {
  mpz_class x, y, z;
  ExactPoint() = default;
  ExactPoint(mpz_class x_, mpz_class y_, mpz_class z_) : x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}
};

int min_exponent(std::initializer_list<const Point3*> pts) {
  int lo = std::numeric_limits<int>::max();
  for (const Point3* p : pts) {
    for (double v : {p->x, p->y, p->z}) {
      if (v == 0.0) continue;
      int e = 0;
      std::frexp(v, &e);
      lo = std::min(lo, e - 53);
    }
  }
  return lo == std::numeric_limits<int>::max() ? 0 : lo;
}

mpz_class to_integer(double v, int base) {
  if (v == 0.0) return 0;
  int e = 0;
  const double f = std::frexp(v, &e);
  mpz_class m(static_cast<long>(std::ldexp(f, 53)));
  mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(e - 53 - base));
  return m;
}

template <std::size_t N>
std::array<ExactPoint, N> exact_points(const std::array<const Point3*, N>& pts) {
  int base = std::numeric_limits<int>::max();
  for (const Point3* p : pts) base = std::min(base, min_exponent({p}));
  std::array<ExactPoint, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = ExactPoint(to_integer(pts[i]->x, base), to_integer(pts[i]->y, base), to_integer(pts[i]->z, base));
  }
  return out;
}

ExactPoint sub(const ExactPoint& a, const ExactPoint& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
ExactPoint cross(const ExactPoint& a, const ExactPoint& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
mpz_class dot(const ExactPoint& a, const ExactPoint& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

int sign(const mpz_class& v) { return sgn(v); }

// det[b - a, c - a, d - a]
mpz_class exact_orient(const ExactPoint& a, const ExactPoint& b, const ExactPoint& c, const ExactPoint& d) {
  return dot(cross(sub(b, a), sub(c, a)), sub(d, a));
}

// Lifted 4x4 determinant with rows (p - e, |p - e|^2), p in (a, b, c, d).
// Positive when e is inside the sphere of a tetrahedron with negative
// det[b - a, c - a, d - a]; the caller flips the sign.
mpz_class exact_lifted(const ExactPoint& a, const ExactPoint& b, const ExactPoint& c, const ExactPoint& d,
                       const ExactPoint& e) {
  const ExactPoint ae = sub(a, e), be = sub(b, e), ce = sub(c, e), de = sub(d, e);
  const mpz_class al = dot(ae, ae), bl = dot(be, be), cl = dot(ce, ce), dl = dot(de, de);
  const mpz_class ab = ae.x * be.y - be.x * ae.y;
  const mpz_class bc = be.x * ce.y - ce.x * be.y;
  const mpz_class cd = ce.x * de.y - de.x * ce.y;
  const mpz_class da = de.x * ae.y - ae.x * de.y;
  const mpz_class ac = ae.x * ce.y - ce.x * ae.y;
  const mpz_class bd = be.x * de.y - de.x * be.y;
  const mpz_class abc = ae.z * bc - be.z * ac + ce.z * ab;
  const mpz_class bcd = be.z * cd - ce.z * bd + de.z * bc;
  const mpz_class cda = ce.z * da + de.z * ac + ae.z * cd;
  const mpz_class dab = de.z * ab + ae.z * bd + be.z * da;
  return (dl * abc - cl * dab) + (bl * cda - al * bcd);
}

}  // namespace

int orient3d(const Point3& pa, const Point3& pb, const Point3& pc, const Point3& pd) {
  // Shewchuk's stage-A filter on det[a - d, b - d, c - d], which equals
  // -det[b - a, c - a, d - a].
  const double adx = pa.x - pd.x, bdx = pb.x - pd.x, cdx = pc.x - pd.x;
  const double ady = pa.y - pd.y, bdy = pb.y - pd.y, cdy = pc.y - pd.y;
  const double adz = pa.z - pd.z, bdz = pb.z - pd.z, cdz = pc.z - pd.z;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;

  const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                           (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                           (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
  const double bound = kOrientBound * permanent;
  if (det > bound) return -1;
  if (-det > bound) return 1;

  ++g_exact_calls;
  const auto q = exact_points<4>({&pa, &pb, &pc, &pd});
  return sign(exact_orient(q[0], q[1], q[2], q[3]));
}

int insphere(const Point3& pa, const Point3& pb, const Point3& pc, const Point3& pd, const Point3& pe) {
  const double aex = pa.x - pe.x, bex = pb.x - pe.x, cex = pc.x - pe.x, dex = pd.x - pe.x;
  const double aey = pa.y - pe.y, bey = pb.y - pe.y, cey = pc.y - pe.y, dey = pd.y - pe.y;
  const double aez = pa.z - pe.z, bez = pb.z - pe.z, cez = pc.z - pe.z, dez = pd.z - pe.z;

  const double aexbey = aex * bey, bexaey = bex * aey;
  const double bexcey = bex * cey, cexbey = cex * bey;
  const double cexdey = cex * dey, dexcey = dex * cey;
  const double dexaey = dex * aey, aexdey = aex * dey;
  const double aexcey = aex * cey, cexaey = cex * aey;
  const double bexdey = bex * dey, dexbey = dex * bey;

  const double ab = aexbey - bexaey;
  const double bc = bexcey - cexbey;
  const double cd = cexdey - dexcey;
  const double da = dexaey - aexdey;
  const double ac = aexcey - cexaey;
  const double bd = bexdey - dexbey;

  const double abc = aez * bc - bez * ac + cez * ab;
  const double bcd = bez * cd - cez * bd + dez * bc;
  const double cda = cez * da + dez * ac + aez * cd;
  const double dab = dez * ab + aez * bd + bez * da;

  const double alift = aex * aex + aey * aey + aez * aez;
  const double blift = bex * bex + bey * bey + bez * bez;
  const double clift = cex * cex + cey * cey + cez * cez;
  const double dlift = dex * dex + dey * dey + dez * dez;

  const double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

  const double aezp = std::abs(aez), bezp = std::abs(bez), cezp = std::abs(cez), dezp = std::abs(dez);
  const double aexbeyp = std::abs(aexbey), bexaeyp = std::abs(bexaey);
  const double bexceyp = std::abs(bexcey), cexbeyp = std::abs(cexbey);
  const double cexdeyp = std::abs(cexdey), dexceyp = std::abs(dexcey);
  const double dexaeyp = std::abs(dexaey), aexdeyp = std::abs(aexdey);
  const double aexceyp = std::abs(aexcey), cexaeyp = std::abs(cexaey);
  const double bexdeyp = std::abs(bexdey), dexbeyp = std::abs(dexbey);
  const double permanent =
      ((cexdeyp + dexceyp) * bezp + (dexbeyp + bexdeyp) * cezp + (bexceyp + cexbeyp) * dezp) * alift +
      ((dexaeyp + aexdeyp) * cezp + (aexceyp + cexaeyp) * dezp + (cexdeyp + dexceyp) * aezp) * blift +
      ((aexbeyp + bexaeyp) * dezp + (bexdeyp + dexbeyp) * aezp + (dexaeyp + aexdeyp) * bezp) * clift +
      ((bexceyp + cexbeyp) * aezp + (cexaeyp + aexceyp) * bezp + (aexbeyp + bexaeyp) * cezp) * dlift;
  const double bound = kInsphereBound * permanent;
  if (det > bound) return -1;
  if (-det > bound) return 1;

  ++g_exact_calls;
  const auto q = exact_points<5>({&pa, &pb, &pc, &pd, &pe});
  return -sign(exact_lifted(q[0], q[1], q[2], q[3], q[4]));
}

int coplanar_incircle(const Point3& pa, const Point3& pb, const Point3& pc, const Point3& pq) {
  // Any sphere through a, b, c meets their plane in the circumcircle, so the
  // in-circle test is an in-sphere test against an apex off the plane.
  ++g_exact_calls;
  const auto e = exact_points<4>({&pa, &pb, &pc, &pq});
  const ExactPoint &a = e[0], &b = e[1], &c = e[2], &q = e[3];
  const ExactPoint n = cross(sub(b, a), sub(c, a));
  const ExactPoint apex(a.x + n.x, a.y + n.y, a.z + n.z);
  const int orientation = sign(exact_orient(a, b, c, apex));  // > 0 by construction
  return -sign(exact_lifted(a, b, c, apex, q)) * orientation;
}

int coplanar_same_side(const Point3& pa, const Point3& pb, const Point3& px, const Point3& pc) {
  ++g_exact_calls;
  const auto e = exact_points<4>({&pa, &pb, &px, &pc});
  const ExactPoint &a = e[0], &b = e[1], &x = e[2], &c = e[3];
  const ExactPoint ab = sub(b, a);
  return sign(dot(cross(ab, sub(x, a)), cross(ab, sub(c, a))));
}

unsigned long long exact_fallback_count() { return g_exact_calls; }

}  // namespace tdacloud::predicates
