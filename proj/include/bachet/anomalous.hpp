#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bachet/curves.hpp"
#include "bachet/numtheory.hpp"

namespace bachet {

// One solution of p^2 = 3n^2 + 3n + 1, equivalently (2p)^2 - 3(2n+1)^2 = 1,
// with the companion square-root sequences: 3 s_k^2 = 2p_k - 3n_k - 2 and
// u_k^2 = 2p_k - 3n_k - 1. Entries grow by a factor ~14 per step; stored in
// 128 bits with an overflow error rather than wraparound.
struct PellEntry {
  uint32_t k = 0;
  uint128 p = 0;
  uint128 n = 0;
  uint128 s = 0;
  uint128 u = 0;
};

std::vector<PellEntry> pell_sequence(uint32_t count);

// Witness that p^2 is a Bachet anomalous number: p^2 = 3n^2 + 3n + 1,
// p = a^2 + 3b^2, t in {a + 3b, a - 3b} with t^2 - 2p = -1, so the trace
// over F_{p^2} lifts to -1 and the opposite twist has order exactly p^2.
struct AnomalousCertificate {
  uint64_t p = 0;
  uint64_t n = 0;
  int64_t a = 0;
  int64_t b = 0;
  int64_t t = 0;
  int64_t lifted = 0;
  // true when p was inside the F_{p^2} oracle bound and an explicit D with
  // order p^2 was exhibited there
  bool oracle_checked = false;
};

// Smallest D in 1..p-1 with #E(F_p: y^2 = x^3 + D) = p, or absent. Short
// circuits for p = 2 mod 3 and for p not of hex form.
std::optional<uint64_t> find_anomalous_D(uint64_t p);

inline constexpr uint64_t kAnomalousVerifyBound = 5000;

// A prime is Bachet anomalous iff it is a centered hexagonal number; below
// verify_bound the claim is confirmed constructively via find_anomalous_D.
bool is_bachet_anomalous_prime(uint64_t p, uint64_t verify_bound = kAnomalousVerifyBound);

// The explicit (a, b) from the hex-prime construction, together with which
// of the two order formulas wins: p+1+a+3b for even n, p+1+a-3b for odd n.
struct HexPrimeAb {
  int64_t a = 0;
  int64_t b = 0;
  bool plus_sign = false;  // order formula is p+1+a+3b when true, p+1+a-3b otherwise
  uint64_t order_value = 0;
};

HexPrimeAb hex_prime_ab(uint64_t p);

// (a, b) for p^2 = 3n^2 + 3n + 1: b is the square root of whichever of
// (2p-3n-2)/12, (2p+3n+1)/12 is a perfect square (exactly one is), and a is
// normalized so that the trace t with t^2 = 2p - 1 is positive.
std::pair<int64_t, int64_t> ab_construct(uint64_t p, uint64_t n);

AnomalousCertificate anomalous_square_certificate(uint64_t p);

// Whether p^r passes the necessary hex-form condition; always false for
// r = 0 mod 3 (a cube difference of consecutive cubes would violate FLT).
bool hex_power_check(uint64_t p, uint32_t r);

// Count of primes 5 <= p <= bound with trace 1 on y^2 = x^3 + d, plus the
// empirical constant count * log(bound) / sqrt(bound). A density probe only.
struct AnomalousDensity {
  uint64_t count = 0;
  double c_estimate = 0.0;
  std::vector<uint64_t> primes;
};

AnomalousDensity count_anomalous_primes(int64_t d, uint64_t bound);

}  // namespace bachet
