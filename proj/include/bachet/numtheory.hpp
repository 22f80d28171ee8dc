#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bachet {

using int128 = __int128;
using uint128 = unsigned __int128;

// ---------------------------------------------------------------------------
// Basic modular arithmetic. All moduli are 64-bit; intermediates use 128 bits.
// ---------------------------------------------------------------------------

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<uint128>(a) * b % m);
}

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m);

// Floor square root, exact for all 64-bit inputs.
uint64_t isqrt(uint64_t n);
uint64_t isqrt_u128(uint128 n);

// Reduce a signed value into [0, m).
inline uint64_t mod_s(int64_t a, uint64_t m) {
  int64_t r = a % static_cast<int64_t>(m);
  return static_cast<uint64_t>(r < 0 ? r + static_cast<int64_t>(m) : r);
}

std::string int128_to_string(int128 v);
std::string uint128_to_string(uint128 v);

// ---------------------------------------------------------------------------
// Deterministic pseudo-random stream (splitmix64). Every randomized routine
// in the library takes one of these explicitly; nothing reads ambient entropy.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased uniform draw from [0, bound) by rejection.
  uint64_t below(uint64_t bound);

  // Stateless mixing function used to derive independent substreams.
  static uint64_t mix(uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  uint64_t state_;
};

// ---------------------------------------------------------------------------
// Primes and factorization (trial-division scale).
// ---------------------------------------------------------------------------

// Deterministic Miller-Rabin, valid for the full 64-bit range.
bool is_prime(uint64_t n);

// All primes in [lo, hi], ascending. Range width is capped (desk scale).
std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi);

// Prime factorization as (prime, exponent) pairs, primes ascending.
std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n);

std::vector<uint64_t> divisors(uint64_t n);
uint64_t euler_phi(uint64_t n);

// Uniform over the primes in [lo, hi]; throws if the range contains none.
uint64_t random_prime(uint64_t lo, uint64_t hi, Rng& rng);

// ---------------------------------------------------------------------------
// Quadratic/cubic/sextic residue structure mod p.
// ---------------------------------------------------------------------------

// (a|p) in {-1, 0, 1}; p must be an odd prime.
int legendre_symbol(int64_t a, uint64_t p);

// Square root mod an odd prime (Tonelli-Shanks); absent for non-residues.
std::optional<uint64_t> sqrt_mod(uint64_t a, uint64_t p);

struct ResidueClassification {
  bool is_quadratic_residue = false;
  bool is_cubic_residue = false;
  // Present iff p = 1 mod 3: the i with d = g^i * (sextic residue), g the
  // smallest quadratic and cubic non-residue mod p.
  std::optional<int> sextic_index;
};

ResidueClassification classify_residue(int64_t d, uint64_t p);

// Smallest g that is neither a square nor a cube mod p; requires p = 1 mod 3.
uint64_t find_sextic_generator(uint64_t p);

// p = a^2 + 3b^2 with b > 0 and a = 1 mod 3 (unique, Gauss); p = 1 mod 3.
struct GaussRepresentation {
  int64_t a = 0;
  int64_t b = 0;
  uint64_t p = 0;
};

GaussRepresentation gauss_representation(uint64_t p);

// ---------------------------------------------------------------------------
// Centered hexagonal numbers, valuations, gcd sums, CRT.
// ---------------------------------------------------------------------------

// The n > 0 with q = 3n^2 + 3n + 1, if any.
std::optional<uint64_t> hex_form(uint64_t q);

// p-adic valuation with a distinguished infinity for ord_p(0).
class Valuation {
 public:
  static Valuation infinite() { return Valuation(true, 0); }
  static Valuation finite(uint32_t v) { return Valuation(false, v); }

  bool is_infinite() const { return infinite_; }
  uint32_t value() const;  // throws when infinite

  // Infinity compares greater than every finite threshold.
  bool at_least(int64_t threshold) const {
    return infinite_ || static_cast<int64_t>(value_) >= threshold;
  }

  friend bool operator==(const Valuation& a, const Valuation& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

  std::string str() const;

 private:
  Valuation(bool inf, uint32_t v) : infinite_(inf), value_(v) {}
  bool infinite_;
  uint32_t value_;
};

Valuation valuation(uint64_t p, uint64_t n);

// Pillai gcd-sum g(k) = sum_{x=1..k} gcd(x, k), via sum_{d|k} d*phi(k/d).
uint64_t pillai_gcd_sum(uint64_t k);

struct CrtResult {
  uint64_t value = 0;
  uint64_t modulus = 1;
};

// Simultaneous congruences x = v_i mod m_i; moduli must be pairwise coprime.
CrtResult crt_combine(const std::vector<std::pair<uint64_t, uint64_t>>& congruences);

}  // namespace bachet
