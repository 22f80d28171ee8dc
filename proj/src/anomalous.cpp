#include "bachet/anomalous.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bachet {

namespace {

void require_prime(uint64_t p, const char* who) {
  if (p < 5 || !is_prime(p))
    throw std::invalid_argument(std::string(who) + ": p must be a prime >= 5");
}

}  // namespace

std::vector<PellEntry> pell_sequence(uint32_t count) {
  if (count == 0) throw std::invalid_argument("pell_sequence: count must be positive");
  constexpr uint128 kLimit = static_cast<uint128>(1) << 120;
  std::vector<PellEntry> out;
  out.reserve(count);
  uint128 p0 = 1, n0 = 0, p1 = 13, n1 = 7;
  uint128 s0 = 0, s1 = 1, u0 = 1, u1 = 2;
  for (uint32_t k = 1; k <= count; ++k) {
    if (k == 1) {
      out.push_back({1, p0, n0, s0, u0});
    } else if (k == 2) {
      out.push_back({2, p1, n1, s1, u1});
    } else {
      if (p1 > kLimit) throw std::overflow_error("pell_sequence: entry exceeds 128-bit range");
      uint128 p2 = 14 * p1 - p0;
      uint128 n2 = 14 * n1 - n0 + 6;
      uint128 s2 = 4 * s1 - s0;
      uint128 u2 = 4 * u1 - u0;
      out.push_back({k, p2, n2, s2, u2});
      p0 = p1; p1 = p2;
      n0 = n1; n1 = n2;
      s0 = s1; s1 = s2;
      u0 = u1; u1 = u2;
    }
  }
  return out;
}

std::optional<uint64_t> find_anomalous_D(uint64_t p) {
  require_prime(p, "find_anomalous_D");
  if (p % 3 == 2) return std::nullopt;    // every Bachet trace is 0
  if (!hex_form(p)) return std::nullopt;  // trace 1 needs the hex form
  // locate the trace-1 twist class, then walk D upward until one lands in it
  TwistSpectrum spec = twist_spectrum(p, 1);
  int target = -1;
  for (int i = 0; i < 6; ++i)
    if (spec.traces[i] == 1) target = i;
  if (target < 0)
    throw std::logic_error("find_anomalous_D: hex-form prime without a trace-1 twist");
  for (uint64_t d = 1; d < p; ++d) {
    auto cls = classify_residue(static_cast<int64_t>(d), p);
    if (cls.sextic_index && *cls.sextic_index == target) {
      if (count_points(p, 0, static_cast<int64_t>(d)) != p)
        throw std::logic_error("find_anomalous_D: twist class disagrees with direct count");
      return d;
    }
  }
  throw std::logic_error("find_anomalous_D: empty sextic class (unreachable)");
}

bool is_bachet_anomalous_prime(uint64_t p, uint64_t verify_bound) {
  require_prime(p, "is_bachet_anomalous_prime");
  bool result = hex_form(p).has_value();
  if (p <= verify_bound && find_anomalous_D(p).has_value() != result)
    throw std::logic_error("is_bachet_anomalous_prime: witness search contradicts hex form");
  return result;
}

HexPrimeAb hex_prime_ab(uint64_t p) {
  require_prime(p, "hex_prime_ab");
  auto n_opt = hex_form(p);
  if (!n_opt) throw std::invalid_argument("hex_prime_ab: p is not of the form 3n^2+3n+1");
  int64_t n = static_cast<int64_t>(*n_opt);
  HexPrimeAb out;
  if (n % 2 == 0) {
    out.b = n / 2;
    out.a = -3 * out.b - 1;
    out.plus_sign = true;
  } else {
    out.b = (n + 1) / 2;
    out.a = 3 * out.b - 1;
    out.plus_sign = false;
  }
  int64_t order = static_cast<int64_t>(p) + 1 + out.a + (out.plus_sign ? 3 : -3) * out.b;
  if (out.a * out.a + 3 * out.b * out.b != static_cast<int64_t>(p) ||
      order != static_cast<int64_t>(p))
    throw std::logic_error("hex_prime_ab: construction identities failed");
  out.order_value = static_cast<uint64_t>(order);
  return out;
}

std::pair<int64_t, int64_t> ab_construct(uint64_t p, uint64_t n) {
  uint128 lhs = static_cast<uint128>(p) * p;
  uint128 rhs = 3 * static_cast<uint128>(n) * n + 3 * static_cast<uint128>(n) + 1;
  if (lhs != rhs) throw std::invalid_argument("ab_construct: p^2 != 3n^2 + 3n + 1");

  // exactly one of (2p - 3n - 2)/12 and (2p + 3n + 1)/12 is a perfect square
  int64_t sp = static_cast<int64_t>(p), sn = static_cast<int64_t>(n);
  int64_t b = -1;
  int matches = 0;
  for (int64_t v : {2 * sp - 3 * sn - 2, 2 * sp + 3 * sn + 1}) {
    if (v >= 0 && v % 12 == 0) {
      uint64_t q = static_cast<uint64_t>(v / 12);
      uint64_t r = isqrt(q);
      if (r * r == q) {
        b = static_cast<int64_t>(r);
        ++matches;
      }
    }
  }
  if (matches != 1) throw std::logic_error("ab_construct: square branch count is not one");

  uint64_t w2 = static_cast<uint64_t>(12 * b * b + 1);
  uint64_t w = isqrt(w2);
  if (w * w != w2) throw std::logic_error("ab_construct: 12b^2 + 1 is not a perfect square");

  // t^2 = 2p - 1; normalize to the positive root, then a is whichever of
  // t -+ 3b satisfies a^2 + 3b^2 = p
  uint64_t t2 = 2 * p - 1;
  int64_t t = static_cast<int64_t>(isqrt(t2));
  if (static_cast<uint64_t>(t) * t != t2)
    throw std::logic_error("ab_construct: 2p - 1 is not a perfect square");
  for (int64_t a : {t - 3 * b, t + 3 * b}) {
    if (a * a + 3 * b * b == sp) return {a, b};
  }
  throw std::logic_error("ab_construct: no sign assignment matched a^2 + 3b^2 = p");
}

AnomalousCertificate anomalous_square_certificate(uint64_t p) {
  require_prime(p, "anomalous_square_certificate");
  if (p > (1ULL << 31))
    throw std::overflow_error("anomalous_square_certificate: p^2 exceeds 64 bits");
  auto n_opt = hex_form(p * p);
  if (!n_opt)
    throw std::invalid_argument(
        "anomalous_square_certificate: p^2 is not of hex form (not in Pell sequence)");
  AnomalousCertificate cert;
  cert.p = p;
  cert.n = *n_opt;
  auto [a, b] = ab_construct(p, cert.n);
  cert.a = a;
  cert.b = b;
  cert.t = (a + 3 * b) * (a + 3 * b) == 2 * static_cast<int64_t>(p) - 1 ? a + 3 * b : a - 3 * b;
  cert.lifted = weil_lift(cert.t, p, 2);
  if (cert.lifted != -1)
    throw std::logic_error("anomalous_square_certificate: lifted trace is not -1");
  if (p <= kFq2OracleBound) {
    auto d = fq2_find_anomalous_d(p);
    if (!d) throw std::logic_error("anomalous_square_certificate: oracle found no order-p^2 curve");
    cert.oracle_checked = true;
  }
  return cert;
}

bool hex_power_check(uint64_t p, uint32_t r) {
  require_prime(p, "hex_power_check");
  if (r == 0) throw std::invalid_argument("hex_power_check: r must be positive");
  uint128 q = 1;
  for (uint32_t i = 0; i < r; ++i) {
    q *= p;
    if (q > UINT64_MAX) throw std::overflow_error("hex_power_check: p^r exceeds 64 bits");
  }
  bool result = hex_form(static_cast<uint64_t>(q)).has_value();
  if (r % 3 == 0 && result)
    throw std::logic_error("hex_power_check: cube power passed the hex test (FLT violated)");
  return result;
}

AnomalousDensity count_anomalous_primes(int64_t d, uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("count_anomalous_primes: bound must be positive");
  if (bound > (1ULL << 40))
    throw std::invalid_argument("count_anomalous_primes: bound above desk scale");
  AnomalousDensity out;
  // only hex-form primes can have trace 1, so walk the hex numbers directly
  for (uint64_t n = 1;; ++n) {
    uint64_t q = 3 * n * n + 3 * n + 1;
    if (q > bound) break;
    if (!is_prime(q)) continue;
    if (mod_s(d, q) == 0) continue;  // bad reduction
    if (trace(q, 0, d) == 1) {
      ++out.count;
      out.primes.push_back(q);
    }
  }
  out.c_estimate = static_cast<double>(out.count) * std::log(static_cast<double>(bound)) /
                   std::sqrt(static_cast<double>(bound));
  return out;
}

}  // namespace bachet
