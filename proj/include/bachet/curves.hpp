#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "bachet/numtheory.hpp"

namespace bachet {

// A short-Weierstrass curve y^2 = x^3 + c x + d reduced into Z/modulus.
// The Bachet family is c = 0.
struct CurveParams {
  uint64_t modulus = 0;
  int64_t c = 0;
  int64_t d = 0;
};

struct CurvePoint {
  bool at_infinity = true;
  uint64_t x = 0;
  uint64_t y = 0;

  static CurvePoint infinity() { return CurvePoint{}; }
  static CurvePoint affine(uint64_t x, uint64_t y) { return CurvePoint{false, x, y}; }

  friend bool operator==(const CurvePoint& a, const CurvePoint& b) {
    if (a.at_infinity || b.at_infinity) return a.at_infinity == b.at_infinity;
    return a.x == b.x && a.y == b.y;
  }
};

// A failed inversion mod a composite modulus exposes a proper divisor; for
// residue-ring point arithmetic this is a meaningful outcome, not an error.
struct FoundFactor {
  uint64_t factor = 0;
};

using PointResult = std::variant<CurvePoint, FoundFactor>;

// disc = -16(4c^3 + 27d^2); zero means the curve is singular over Q.
int128 discriminant(int64_t c, int64_t d);

// p >= 5 and p does not divide the discriminant.
bool good_reduction(uint64_t p, int64_t c, int64_t d);

// #E(F_p) by the quadratic-character sum, including the point at infinity.
uint64_t count_points(uint64_t p, int64_t c, int64_t d);

// t = p + 1 - #E(F_p). For the Bachet family at p = 2 mod 3 this is 0
// without counting.
int64_t trace(uint64_t p, int64_t c, int64_t d);

// Traces and orders of the six sextic twists y^2 = x^3 + g^i * d over F_p,
// g the smallest quadratic and cubic non-residue. Only t_0 and t_2 are
// counted directly; the rest follow from the twist trace identities, and
// the quadratic in t_0 with roots {t_2, t_4} is verified as a cross-check.
struct TwistSpectrum {
  uint64_t p = 0;
  uint64_t g = 0;
  std::array<int64_t, 6> traces{};
  std::array<uint64_t, 6> orders{};
};

TwistSpectrum twist_spectrum(uint64_t p, int64_t base_d = 1);

// alpha^r + beta^r for alpha + beta = t, alpha * beta = q, via the integer
// recurrence T_k = t T_{k-1} - q T_{k-2}; #E(F_{q^r}) = q^r + 1 - result.
int64_t weil_lift(int64_t t, uint64_t q, uint32_t r);

// The set of orders the Bachet family can take over F_p: {p+1} for
// p = 2 mod 3, else the six values p+1 +- 2a, p+1 -+ a +- 3b from
// p = a^2 + 3b^2. Sorted ascending.
std::vector<uint64_t> order_candidates(uint64_t p);

bool is_on_curve(const CurveParams& curve, const CurvePoint& pt);

// Chord-tangent addition over Z/modulus. Inputs must lie on the curve.
PointResult point_add(const CurveParams& curve, const CurvePoint& a, const CurvePoint& b);

// k * pt by double-and-add; 0 * pt is the point at infinity.
PointResult scalar_mul(const CurveParams& curve, uint64_t k, const CurvePoint& pt);

// --- quadratic-extension oracle (bounded; used for independent checks) ---

inline constexpr uint64_t kFq2OracleBound = 200;

// Element a + b*w of F_{p^2} = F_p[w]/(w^2 - ns), ns the smallest
// non-residue mod p.
struct Fq2Elem {
  uint64_t a = 0;
  uint64_t b = 0;
};

// #E(F_{p^2}) for y^2 = x^3 + c x + d by evaluating the quadratic character
// of f(x) at every extension element; p <= kFq2OracleBound.
uint64_t fq2_count_points(uint64_t p, int64_t c, int64_t d);

// #E(F_{p^2}) for y^2 = x^3 + D with D = d.a + d.b*w in F_{p^2}.
uint64_t fq2_bachet_order(uint64_t p, Fq2Elem d);

// Smallest (lexicographic) D in F_{p^2} with #E(F_{p^2}) = p^2, if any.
std::optional<Fq2Elem> fq2_find_anomalous_d(uint64_t p);

}  // namespace bachet
