#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bachet/curves.hpp"
#include "bachet/numtheory.hpp"

namespace bachet {

// Per-prime breakdown of the Type I criterion: good reduction, the
// divisibility p+1-a_p | n+1-a_n, and the valuation condition
// ord_p(a_n - 1) >= ord_p(n) - (a_p != 1 mod p ? 1 : 0).
struct PrimeCondition {
  uint64_t p = 0;
  uint32_t multiplicity = 0;
  int64_t a_p = 0;
  uint64_t m_p = 0;  // p + 1 - a_p
  bool good_reduction = false;
  bool divides = false;
  bool ord_condition = false;
  // a_p = 1 mod p; for p >= 7 Hasse forces a_p = 1 when this is set
  bool ap_one_mod_p = false;
};

struct KorseltReport {
  uint64_t n = 0;
  int64_t c = 0;
  int64_t d = 0;
  int64_t a_n = 0;
  std::vector<PrimeCondition> per_prime;
  bool verdict = false;
  std::string reason;  // set when the verdict short-circuits
};

// n-th L-series coefficient of y^2 = x^3 + cx + d: multiplicative, with
// a_{p^{k+1}} = a_p a_{p^k} - p a_{p^{k-1}} at prime powers. Distinct from
// the Frobenius trace over F_{p^k}.
int64_t a_coeff(int64_t c, int64_t d, uint64_t n);

KorseltReport korselt_type1_check(int64_t c, int64_t d, uint64_t n);

// Divisibility-only shortcut for n = pq with p, q >= 7 distinct; equal to
// the full criterion by the two-prime equivalence.
bool korselt_two_prime_check(int64_t c, int64_t d, uint64_t p, uint64_t q);

// Integer (c, d) making every listed prime anomalous, found per prime and
// combined by CRT. Hex-form primes use the Bachet family (c = 0).
CurveParams build_anomalous_product_curve(const std::vector<uint64_t>& primes);

enum class SilvCondition { C1, C2, C3 };

const char* to_string(SilvCondition c);

// For a square-free Type I Korselt n = p_1 ... p_m with 5 <= p_1 < ... < p_m:
// C1: p_1...p_{m-1} <= 4^m; C2: a_{p_m} = 1 and the remaining traces are
// +-1 with an even number of -1; C3: p_1...p_{m-1} >= sqrt(p_m)/4^m.
// Guaranteed nonempty.
std::set<SilvCondition> gen_silv_classify(int64_t c, int64_t d, uint64_t n);

// (n + 1 - a_n) P over Z/n. When an affine inversion surfaces a factor, the
// modulus is split there and the check continues per part, so the verdict is
// the true group-theoretic one; every surfaced factor is reported.
struct PseudoprimeResult {
  bool is_pseudoprime = false;
  uint64_t scalar = 0;  // n + 1 - a_n
  std::vector<uint64_t> factors_found;
};

PseudoprimeResult elliptic_pseudoprime_check(const CurveParams& curve, const CurvePoint& pt);

// All semiprimes pq <= bound with 7 <= p < q passing the two-prime check,
// ordered by the product.
std::vector<std::pair<uint64_t, uint64_t>> korselt_search(int64_t c, int64_t d, uint64_t bound);

// A uniform-x point on the curve mod its (square-free) modulus: x is drawn
// until f(x) is a square mod every prime factor, then y is lifted by CRT
// with per-factor signs taken from the stream.
CurvePoint sample_point(const CurveParams& curve, Rng& rng);

}  // namespace bachet
