#include "bachet/curves.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bachet {

namespace {

constexpr int64_t kCoeffLimit = 1LL << 40;  // keeps 4c^3 inside 128 bits

// quadratic character table chi[a] in {-1, 0, 1}; O(p) build, O(1) lookup
std::vector<int8_t> legendre_table(uint64_t p) {
  std::vector<int8_t> chi(p, -1);
  chi[0] = 0;
  for (uint64_t x = 1; x <= (p - 1) / 2; ++x) chi[mulmod(x, x, p)] = 1;
  return chi;
}

void require_prime_p(uint64_t p, const char* who) {
  if (p < 5 || !is_prime(p))
    throw std::invalid_argument(std::string(who) + ": p must be a prime >= 5");
}

void require_good_reduction(uint64_t p, int64_t c, int64_t d, const char* who) {
  if (!good_reduction(p, c, d))
    throw std::invalid_argument(std::string(who) + ": bad reduction at p=" + std::to_string(p) +
                                " (discriminant = 0 mod p)");
}

}  // namespace

int128 discriminant(int64_t c, int64_t d) {
  if (c > kCoeffLimit || c < -kCoeffLimit || d > kCoeffLimit || d < -kCoeffLimit)
    throw std::overflow_error("discriminant: coefficient magnitude above desk scale");
  int128 cc = c, dd = d;
  return -16 * (4 * cc * cc * cc + 27 * dd * dd);
}

bool good_reduction(uint64_t p, int64_t c, int64_t d) {
  if (p < 5) return false;
  uint64_t cr = mod_s(c, p), dr = mod_s(d, p);
  uint64_t delta = (4 * mulmod(mulmod(cr, cr, p), cr, p) + 27 * mulmod(dr, dr, p)) % p;
  return delta != 0;
}

uint64_t count_points(uint64_t p, int64_t c, int64_t d) {
  require_prime_p(p, "count_points");
  require_good_reduction(p, c, d, "count_points");
  uint64_t cr = mod_s(c, p), dr = mod_s(d, p);
  int64_t sum = 0;
  if (p <= (1ULL << 22)) {
    auto chi = legendre_table(p);
    for (uint64_t x = 0; x < p; ++x) {
      uint64_t fx = (mulmod(mulmod(x, x, p), x, p) + mulmod(cr, x, p) + dr) % p;
      sum += chi[fx];
    }
  } else {
    for (uint64_t x = 0; x < p; ++x) {
      uint64_t fx = (mulmod(mulmod(x, x, p), x, p) + mulmod(cr, x, p) + dr) % p;
      if (fx == 0) continue;
      sum += powmod(fx, (p - 1) / 2, p) == 1 ? 1 : -1;
    }
  }
  return p + 1 + sum;
}

int64_t trace(uint64_t p, int64_t c, int64_t d) {
  require_prime_p(p, "trace");
  if (p % 3 == 2 && mod_s(c, p) == 0 && mod_s(d, p) != 0) return 0;
  return static_cast<int64_t>(p + 1) - static_cast<int64_t>(count_points(p, c, d));
}

TwistSpectrum twist_spectrum(uint64_t p, int64_t base_d) {
  require_prime_p(p, "twist_spectrum");
  if (p % 3 != 1)
    throw std::invalid_argument("twist_spectrum: p = 2 mod 3 has a single order p+1");
  uint64_t d0 = mod_s(base_d, p);
  if (d0 == 0) throw std::invalid_argument("twist_spectrum: base D = 0 mod p is singular");

  TwistSpectrum spec;
  spec.p = p;
  spec.g = find_sextic_generator(p);
  uint64_t g2 = mulmod(spec.g, spec.g, p);

  // two direct counts; the other four traces follow from the negation and
  // zero-sum identities of the twist family
  int64_t t0 = trace(p, 0, static_cast<int64_t>(d0));
  int64_t t2 = trace(p, 0, static_cast<int64_t>(mulmod(d0, g2, p)));
  int64_t t4 = -t0 - t2;
  spec.traces = {t0, -t4, t2, -t0, t4, -t2};
  for (int i = 0; i < 6; ++i)
    spec.orders[i] = static_cast<uint64_t>(static_cast<int64_t>(p + 1) - spec.traces[i]);

  // cross-check: {t2, t4} must be the roots of x^2 + t0 x + t0^2 - 3p
  int64_t disc = 3 * (4 * static_cast<int64_t>(p) - t0 * t0);
  int64_t root = static_cast<int64_t>(isqrt(static_cast<uint64_t>(disc)));
  if (root * root != disc)
    throw std::logic_error("twist_spectrum: trace quadratic discriminant is not a square");
  int64_t r1 = (-t0 + root) / 2, r2 = (-t0 - root) / 2;
  if (!((r1 == t2 && r2 == t4) || (r1 == t4 && r2 == t2)))
    throw std::logic_error("twist_spectrum: counted twists disagree with the trace quadratic");
  return spec;
}

int64_t weil_lift(int64_t t, uint64_t q, uint32_t r) {
  if (r == 0) throw std::invalid_argument("weil_lift: r must be positive");
  uint128 tabs = static_cast<uint128>(t < 0 ? -t : t);
  if (tabs * tabs > static_cast<uint128>(4) * q)
    throw std::invalid_argument("weil_lift: |t| > 2 sqrt(q) is not a valid trace");
  int128 prev = 2, cur = t;
  for (uint32_t k = 2; k <= r; ++k) {
    int128 next, sub;
    if (__builtin_mul_overflow(cur, static_cast<int128>(t), &next) ||
        __builtin_mul_overflow(prev, static_cast<int128>(q), &sub) ||
        __builtin_sub_overflow(next, sub, &next))
      throw std::overflow_error("weil_lift: overflow at r=" + std::to_string(k));
    prev = cur;
    cur = next;
  }
  if (cur > INT64_MAX || cur < INT64_MIN)
    throw std::overflow_error("weil_lift: result exceeds 64 bits");
  return static_cast<int64_t>(cur);
}

std::vector<uint64_t> order_candidates(uint64_t p) {
  require_prime_p(p, "order_candidates");
  if (p % 3 == 2) return {p + 1};
  GaussRepresentation rep = gauss_representation(p);
  int64_t base = static_cast<int64_t>(p) + 1;
  int64_t a = rep.a, b = rep.b;
  std::vector<int64_t> vals = {base + 2 * a, base - 2 * a, base - a + 3 * b,
                               base - a - 3 * b, base + a + 3 * b, base + a - 3 * b};
  std::vector<uint64_t> out;
  out.reserve(vals.size());
  for (int64_t v : vals) out.push_back(static_cast<uint64_t>(v));
  std::sort(out.begin(), out.end());
  return out;
}

bool is_on_curve(const CurveParams& curve, const CurvePoint& pt) {
  if (pt.at_infinity) return true;
  uint64_t n = curve.modulus;
  uint64_t cr = mod_s(curve.c, n), dr = mod_s(curve.d, n);
  uint64_t lhs = mulmod(pt.y, pt.y, n);
  uint64_t rhs = (mulmod(mulmod(pt.x, pt.x, n), pt.x, n) + mulmod(cr, pt.x, n) + dr) % n;
  return lhs == rhs;
}

namespace {

// inverse of a mod n, or the proper divisor gcd(a, n) when not invertible
std::variant<uint64_t, FoundFactor> try_invert(uint64_t a, uint64_t n) {
  int64_t t = 0, newt = 1;
  int64_t r = static_cast<int64_t>(n), newr = static_cast<int64_t>(a % n);
  while (newr != 0) {
    int64_t q = r / newr;
    std::swap(t -= q * newt, newt);
    std::swap(r -= q * newr, newr);
  }
  if (r != 1) return FoundFactor{static_cast<uint64_t>(r)};
  return mod_s(t, n);
}

uint64_t submod(uint64_t a, uint64_t b, uint64_t n) { return a >= b ? a - b : a + (n - b); }

}  // namespace

PointResult point_add(const CurveParams& curve, const CurvePoint& a, const CurvePoint& b) {
  uint64_t n = curve.modulus;
  if (n < 2) throw std::invalid_argument("point_add: modulus must be >= 2");
  if (!is_on_curve(curve, a) || !is_on_curve(curve, b))
    throw std::invalid_argument("point_add: point is not on the curve");
  if (a.at_infinity) return b;
  if (b.at_infinity) return a;

  uint64_t num, den;
  uint64_t dx = submod(b.x % n, a.x % n, n);
  uint64_t g = std::gcd(dx, n);
  if (g == 1) {
    num = submod(b.y % n, a.y % n, n);
    den = dx;
  } else if (g != n) {
    return FoundFactor{g};
  } else {
    // x-coordinates agree mod n
    uint64_t sy = (a.y + b.y) % n;
    uint64_t h = std::gcd(sy, n);
    if (h == n) return CurvePoint::infinity();  // b = -a
    if (h != 1) return FoundFactor{h};
    // y1 = y2 mod n here, so this is a doubling; 2y is invertible since h = 1
    uint64_t cr = mod_s(curve.c, n);
    num = (mulmod(3, mulmod(a.x, a.x, n), n) + cr) % n;
    den = mulmod(2, a.y, n);
  }
  auto inv = try_invert(den, n);
  if (std::holds_alternative<FoundFactor>(inv)) return std::get<FoundFactor>(inv);
  uint64_t slope = mulmod(num, std::get<uint64_t>(inv), n);
  uint64_t x3 = submod(submod(mulmod(slope, slope, n), a.x % n, n), b.x % n, n);
  uint64_t y3 = submod(mulmod(slope, submod(a.x % n, x3, n), n), a.y % n, n);
  return CurvePoint::affine(x3, y3);
}

PointResult scalar_mul(const CurveParams& curve, uint64_t k, const CurvePoint& pt) {
  if (!is_on_curve(curve, pt)) throw std::invalid_argument("scalar_mul: point is not on the curve");
  CurvePoint acc = CurvePoint::infinity();
  CurvePoint base = pt;
  while (k > 0) {
    if (k & 1) {
      auto r = point_add(curve, acc, base);
      if (std::holds_alternative<FoundFactor>(r)) return r;
      acc = std::get<CurvePoint>(r);
    }
    k >>= 1;
    if (k > 0) {
      auto r = point_add(curve, base, base);
      if (std::holds_alternative<FoundFactor>(r)) return r;
      base = std::get<CurvePoint>(r);
    }
  }
  return acc;
}

// --- F_{p^2} oracle --------------------------------------------------------

namespace {

// arithmetic in F_p[w]/(w^2 - ns)
struct Fq2 {
  uint64_t p;
  uint64_t ns;

  Fq2Elem mul(Fq2Elem x, Fq2Elem y) const {
    uint64_t a = (mulmod(x.a, y.a, p) + mulmod(ns, mulmod(x.b, y.b, p), p)) % p;
    uint64_t b = (mulmod(x.a, y.b, p) + mulmod(x.b, y.a, p)) % p;
    return {a, b};
  }

  Fq2Elem add(Fq2Elem x, Fq2Elem y) const { return {(x.a + y.a) % p, (x.b + y.b) % p}; }

  Fq2Elem pow(Fq2Elem x, uint64_t e) const {
    Fq2Elem r{1, 0};
    while (e > 0) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }
};

Fq2 make_fq2(uint64_t p) {
  uint64_t ns = 2;
  while (legendre_symbol(static_cast<int64_t>(ns), p) != -1) ++ns;
  return Fq2{p, ns};
}

uint64_t fq2_order_impl(const Fq2& f, Fq2Elem c, Fq2Elem d) {
  uint64_t p = f.p;
  uint64_t q2 = p * p;
  // chi(z) = z^((p^2-1)/2) is 1 for squares, -1 for non-squares, irrelevant at 0
  uint64_t half = (q2 - 1) / 2;
  int64_t sum = 0;
  for (uint64_t xa = 0; xa < p; ++xa) {
    for (uint64_t xb = 0; xb < p; ++xb) {
      Fq2Elem x{xa, xb};
      Fq2Elem fx = f.add(f.add(f.mul(f.mul(x, x), x), f.mul(c, x)), d);
      if (fx.a == 0 && fx.b == 0) continue;
      Fq2Elem chi = f.pow(fx, half);
      sum += (chi.a == 1 && chi.b == 0) ? 1 : -1;
    }
  }
  return q2 + 1 + sum;
}

}  // namespace

uint64_t fq2_count_points(uint64_t p, int64_t c, int64_t d) {
  require_prime_p(p, "fq2_count_points");
  if (p > kFq2OracleBound)
    throw std::invalid_argument("fq2_count_points: p above the oracle bound " +
                                std::to_string(kFq2OracleBound));
  require_good_reduction(p, c, d, "fq2_count_points");
  Fq2 f = make_fq2(p);
  return fq2_order_impl(f, Fq2Elem{mod_s(c, p), 0}, Fq2Elem{mod_s(d, p), 0});
}

uint64_t fq2_bachet_order(uint64_t p, Fq2Elem d) {
  require_prime_p(p, "fq2_bachet_order");
  if (p > kFq2OracleBound)
    throw std::invalid_argument("fq2_bachet_order: p above the oracle bound " +
                                std::to_string(kFq2OracleBound));
  if (d.a % p == 0 && d.b % p == 0)
    throw std::invalid_argument("fq2_bachet_order: D = 0 is singular");
  Fq2 f = make_fq2(p);
  return fq2_order_impl(f, Fq2Elem{0, 0}, Fq2Elem{d.a % p, d.b % p});
}

std::optional<Fq2Elem> fq2_find_anomalous_d(uint64_t p) {
  require_prime_p(p, "fq2_find_anomalous_d");
  if (p > kFq2OracleBound)
    throw std::invalid_argument("fq2_find_anomalous_d: p above the oracle bound " +
                                std::to_string(kFq2OracleBound));
  Fq2 f = make_fq2(p);
  uint64_t target = p * p;
  for (uint64_t a = 0; a < p; ++a) {
    for (uint64_t b = 0; b < p; ++b) {
      if (a == 0 && b == 0) continue;
      if (fq2_order_impl(f, Fq2Elem{0, 0}, Fq2Elem{a, b}) == target) return Fq2Elem{a, b};
    }
  }
  return std::nullopt;
}

}  // namespace bachet
