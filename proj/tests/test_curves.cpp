#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "bachet/curves.hpp"

using namespace bachet;

namespace {

// full (x, y) enumeration, independent of the character-sum path
uint64_t slow_count_points(uint64_t p, int64_t c, int64_t d) {
  uint64_t count = 1;  // infinity
  for (uint64_t x = 0; x < p; ++x) {
    uint64_t fx = (mulmod(mulmod(x, x, p), x, p) + mulmod(mod_s(c, p), x, p) + mod_s(d, p)) % p;
    for (uint64_t y = 0; y < p; ++y)
      if (mulmod(y, y, p) == fx) ++count;
  }
  return count;
}

std::multiset<int64_t> spectrum_by_counting(uint64_t p, int64_t base_d) {
  uint64_t g = find_sextic_generator(p);
  std::multiset<int64_t> out;
  uint64_t gi = 1;
  for (int i = 0; i < 6; ++i) {
    out.insert(static_cast<int64_t>(p + 1) -
               static_cast<int64_t>(count_points(p, 0, static_cast<int64_t>(mulmod(gi, mod_s(base_d, p), p)))));
    gi = mulmod(gi, g, p);
  }
  return out;
}

}  // namespace

TEST_CASE("discriminant") {
  CHECK(discriminant(0, 1) == -432);
  CHECK(discriminant(0, 0) == 0);
  CHECK(discriminant(-3, 2) == 0);
  CHECK(good_reduction(7, 0, 5));
  CHECK_FALSE(good_reduction(3, 0, 1));
  CHECK_FALSE(good_reduction(7, 0, 7));
}

TEST_CASE("count_points examples") {
  CHECK(count_points(7, 0, 1) == 12);
  CHECK(count_points(7, 0, 5) == 7);  // 7 is Bachet anomalous
  CHECK(count_points(13, 0, 1) == 12);
  CHECK_THROWS_WITH_AS(count_points(7, 0, 7), doctest::Contains("p=7"), std::invalid_argument);
}

TEST_CASE("count_points matches point enumeration") {
  for (uint64_t p : primes_in_range(5, 61)) {
    for (int64_t c = -2; c <= 3; ++c) {
      for (int64_t d = -2; d <= 5; ++d) {
        if (!good_reduction(p, c, d)) continue;
        CHECK(count_points(p, c, d) == slow_count_points(p, c, d));
      }
    }
  }
}

TEST_CASE("count stays in the Hasse interval") {
  Rng rng(31337);
  for (int iter = 0; iter < 150; ++iter) {
    uint64_t p = random_prime(5, 2000, rng);
    int64_t c = static_cast<int64_t>(rng.below(p));
    int64_t d = static_cast<int64_t>(rng.below(p));
    if (!good_reduction(p, c, d)) continue;
    uint64_t count = count_points(p, c, d);
    uint64_t h = isqrt(4 * p);
    CHECK(count >= p + 1 - h);
    CHECK(count <= p + 1 + h);
  }
}

TEST_CASE("supersingular count for p = 2 mod 3") {
  for (uint64_t p : primes_in_range(5, 200)) {
    if (p % 3 != 2) continue;
    for (uint64_t d = 1; d < p; ++d)
      CHECK(count_points(p, 0, static_cast<int64_t>(d)) == p + 1);
  }
}

TEST_CASE("trace examples") {
  CHECK(trace(53, 0, 1) == 0);     // 53 = 2 mod 3
  CHECK(trace(2971, 0, 1) == 56);
  CHECK(trace(7, 0, 1) == -4);
}

TEST_CASE("twist spectrum for p = 7 and p = 13") {
  TwistSpectrum s7 = twist_spectrum(7);
  CHECK(s7.g == 3);
  CHECK(s7.traces == std::array<int64_t, 6>{-4, -5, -1, 4, 5, 1});
  CHECK(s7.orders == std::array<uint64_t, 6>{12, 13, 9, 4, 3, 7});

  TwistSpectrum s13 = twist_spectrum(13);
  CHECK(s13.g == 2);
  CHECK(s13.traces == std::array<int64_t, 6>{2, -5, -7, -2, 5, 7});
  // no trace 1, so 13 is not Bachet anomalous
  CHECK(std::find(s13.traces.begin(), s13.traces.end(), 1) == s13.traces.end());

  CHECK_THROWS_AS(twist_spectrum(11), std::invalid_argument);
}

TEST_CASE("twist spectrum equals six independent counts") {
  for (uint64_t p : primes_in_range(7, 400)) {
    if (p % 3 != 1) continue;
    TwistSpectrum spec = twist_spectrum(p);
    std::multiset<int64_t> derived(spec.traces.begin(), spec.traces.end());
    CHECK(derived == spectrum_by_counting(p, 1));

    // structural identities
    CHECK(spec.traces[3] == -spec.traces[0]);
    CHECK(spec.traces[4] == -spec.traces[1]);
    CHECK(spec.traces[5] == -spec.traces[2]);
    CHECK(spec.traces[0] + spec.traces[2] + spec.traces[4] == 0);
    CHECK(spec.traces[1] + spec.traces[3] + spec.traces[5] == 0);
    CHECK(spec.traces[0] % 2 == 0);
    CHECK(spec.traces[2] % 2 != 0);
    for (int i = 0; i < 6; ++i) {
      CHECK(spec.orders[i] == p + 1 - spec.traces[i]);
      CHECK(static_cast<uint64_t>(spec.traces[i] * spec.traces[i]) <= 4 * p);
    }

    // order multiset equals the a^2 + 3b^2 candidate set
    auto candidates = order_candidates(p);
    std::multiset<uint64_t> orders(spec.orders.begin(), spec.orders.end());
    CHECK(orders == std::multiset<uint64_t>(candidates.begin(), candidates.end()));
  }
}

TEST_CASE("twist isomorphism invariance under k^6 scaling") {
  Rng rng(5150);
  for (int iter = 0; iter < 100; ++iter) {
    uint64_t p = random_prime(5, 500, rng);
    uint64_t d = 1 + rng.below(p - 1);
    uint64_t k = 1 + rng.below(p - 1);
    uint64_t k6 = powmod(k, 6, p);
    uint64_t d2 = mulmod(d, k6, p);
    CHECK(count_points(p, 0, static_cast<int64_t>(d)) ==
          count_points(p, 0, static_cast<int64_t>(d2)));
  }
}

TEST_CASE("weil_lift") {
  CHECK(weil_lift(3, 7, 1) == 3);
  CHECK(weil_lift(5, 13, 2) == -1);   // t^2 - 2q
  CHECK(weil_lift(-4, 7, 3) == 20);   // t^3 - 3qt
  CHECK_THROWS_AS(weil_lift(6, 7, 2), std::invalid_argument);
  CHECK_THROWS_AS(weil_lift(3, 7, 0), std::invalid_argument);
}

TEST_CASE("order_candidates") {
  CHECK(order_candidates(7) == std::vector<uint64_t>{3, 4, 7, 9, 12, 13});
  CHECK(order_candidates(13) == std::vector<uint64_t>{7, 9, 12, 16, 19, 21});
  CHECK(order_candidates(11) == std::vector<uint64_t>{12});
  CHECK_THROWS_AS(order_candidates(4), std::invalid_argument);
}

TEST_CASE("point addition basics") {
  CurveParams curve{7, 0, 5};
  // find an affine point
  CurvePoint p0;
  for (uint64_t x = 0; x < 7 && p0.at_infinity; ++x)
    for (uint64_t y = 0; y < 7; ++y)
      if (is_on_curve(curve, CurvePoint::affine(x, y))) {
        p0 = CurvePoint::affine(x, y);
        break;
      }
  REQUIRE_FALSE(p0.at_infinity);

  auto r = point_add(curve, p0, CurvePoint::infinity());
  CHECK(std::get<CurvePoint>(r) == p0);

  CurvePoint neg = CurvePoint::affine(p0.x, (7 - p0.y) % 7);
  auto r2 = point_add(curve, p0, neg);
  CHECK(std::get<CurvePoint>(r2).at_infinity);

  CHECK_THROWS_AS(point_add(curve, CurvePoint::affine(1, 1), p0), std::invalid_argument);
}

TEST_CASE("ring addition surfaces a factor") {
  // modulus 15: find points whose x-difference shares exactly the factor 3
  CurveParams curve{15, 0, 1};
  std::vector<CurvePoint> pts;
  for (uint64_t x = 0; x < 15; ++x)
    for (uint64_t y = 0; y < 15; ++y)
      if (is_on_curve(curve, CurvePoint::affine(x, y))) pts.push_back(CurvePoint::affine(x, y));
  REQUIRE(!pts.empty());
  bool saw_factor_three = false;
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      uint64_t dx = (b.x + 15 - a.x) % 15;
      if (std::gcd(dx, 15ULL) != 3) continue;
      auto r = point_add(curve, a, b);
      if (std::holds_alternative<FoundFactor>(r)) {
        CHECK(std::get<FoundFactor>(r).factor == 3);
        saw_factor_three = true;
      }
    }
  }
  CHECK(saw_factor_three);
}

TEST_CASE("scalar multiplication on an order-7 group") {
  CurveParams curve{7, 0, 5};
  REQUIRE(count_points(7, 0, 5) == 7);
  for (uint64_t x = 0; x < 7; ++x) {
    for (uint64_t y = 0; y < 7; ++y) {
      CurvePoint p = CurvePoint::affine(x, y);
      if (!is_on_curve(curve, p)) continue;
      CHECK(std::get<CurvePoint>(scalar_mul(curve, 0, p)).at_infinity);
      CHECK(std::get<CurvePoint>(scalar_mul(curve, 7, p)).at_infinity);
      CHECK(std::get<CurvePoint>(scalar_mul(curve, 8, p)) == p);
    }
  }
}

TEST_CASE("group law is commutative and associative over prime fields") {
  Rng rng(777);
  int done = 0;
  while (done < 100) {
    uint64_t p = random_prime(5, 200, rng);
    int64_t c = static_cast<int64_t>(rng.below(p));
    int64_t d = static_cast<int64_t>(rng.below(p));
    if (!good_reduction(p, c, d)) continue;
    CurveParams curve{p, c, d};
    std::vector<CurvePoint> pts{CurvePoint::infinity()};
    for (uint64_t x = 0; x < p; ++x) {
      uint64_t fx = (mulmod(mulmod(x, x, p), x, p) + mulmod(mod_s(c, p), x, p) + mod_s(d, p)) % p;
      auto y = sqrt_mod(fx, p);
      if (!y) continue;
      pts.push_back(CurvePoint::affine(x, *y));
      if (*y != 0) pts.push_back(CurvePoint::affine(x, p - *y));
    }
    auto add = [&](const CurvePoint& a, const CurvePoint& b) {
      return std::get<CurvePoint>(point_add(curve, a, b));
    };
    CurvePoint P = pts[rng.below(pts.size())];
    CurvePoint Q = pts[rng.below(pts.size())];
    CurvePoint R = pts[rng.below(pts.size())];
    CHECK(add(P, Q) == add(Q, P));
    CHECK(add(add(P, Q), R) == add(P, add(Q, R)));
    ++done;
  }
}

TEST_CASE("point and lift error paths") {
  CHECK_THROWS_AS(twist_spectrum(7, 7), std::invalid_argument);   // D = 0 mod p
  CHECK_THROWS_AS(twist_spectrum(7, 14), std::invalid_argument);
  CHECK_THROWS_AS(weil_lift(2, 4, 80), std::overflow_error);
  CHECK_THROWS_AS(point_add(CurveParams{1, 0, 1}, CurvePoint::infinity(), CurvePoint::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(scalar_mul(CurveParams{7, 0, 5}, 2, CurvePoint::affine(1, 1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fq2_bachet_order(7, Fq2Elem{0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(fq2_find_anomalous_d(1009), std::invalid_argument);
}

TEST_CASE("group order annihilates random points") {
  Rng rng(0xabadcafe);
  int done = 0;
  while (done < 50) {
    uint64_t p = random_prime(5, 300, rng);
    int64_t c = static_cast<int64_t>(rng.below(p));
    int64_t d = static_cast<int64_t>(rng.below(p));
    if (!good_reduction(p, c, d)) continue;
    uint64_t order = count_points(p, c, d);
    CurveParams curve{p, c, d};
    // random point: try random x until f(x) is a square
    CurvePoint pt;
    for (int tries = 0; tries < 200 && pt.at_infinity; ++tries) {
      uint64_t x = rng.below(p);
      uint64_t fx = (mulmod(mulmod(x, x, p), x, p) + mulmod(mod_s(c, p), x, p) + mod_s(d, p)) % p;
      auto y = sqrt_mod(fx, p);
      if (y) pt = CurvePoint::affine(x, *y);
    }
    if (pt.at_infinity) continue;
    auto r = scalar_mul(curve, order, pt);
    CHECK(std::get<CurvePoint>(r).at_infinity);
    ++done;
  }
}

TEST_CASE("fq2 oracle against the Weil recurrence") {
  CHECK(fq2_count_points(7, 0, 1) == 48);  // 49 + 1 - weil_lift(-4, 7, 2)
  CHECK(fq2_count_points(5, 0, 1) == 25 + 1 - weil_lift(trace(5, 0, 1), 5, 2));

  // the p = 13 twist with trace 5 lifts to trace -1 over F_169
  TwistSpectrum s13 = twist_spectrum(13);
  uint64_t g4 = powmod(s13.g, 4, 13);
  REQUIRE(s13.traces[4] == 5);
  CHECK(fq2_count_points(13, 0, static_cast<int64_t>(g4)) == 171);

  for (uint64_t p : primes_in_range(5, 50)) {
    for (uint64_t d = 1; d < p; ++d) {
      uint64_t expected =
          p * p + 1 - static_cast<uint64_t>(weil_lift(trace(p, 0, static_cast<int64_t>(d)), p, 2));
      CHECK(fq2_count_points(p, 0, static_cast<int64_t>(d)) == expected);
    }
  }
  CHECK_THROWS_AS(fq2_count_points(211, 0, 1), std::invalid_argument);
}

TEST_CASE("fq2 anomalous search finds an order-169 curve") {
  auto d = fq2_find_anomalous_d(13);
  REQUIRE(d.has_value());
  CHECK(fq2_bachet_order(13, *d) == 169);
}
