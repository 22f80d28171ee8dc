#include "bachet/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bachet {

uint64_t powmod(uint64_t base, uint64_t exp, uint64_t m) {
  if (m == 1) return 0;
  uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

uint64_t isqrt(uint64_t n) {
  if (n == 0) return 0;
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

uint64_t isqrt_u128(uint128 n) {
  if (n == 0) return 0;
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  // correct the floating estimate exactly
  while (r > 0 && static_cast<uint128>(r) * r > n) --r;
  while ((static_cast<uint128>(r) + 1) * (static_cast<uint128>(r) + 1) <= n) ++r;
  return r;
}

std::string uint128_to_string(uint128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string int128_to_string(int128 v) {
  if (v < 0) return "-" + uint128_to_string(static_cast<uint128>(-v));
  return uint128_to_string(static_cast<uint128>(v));
}

uint64_t Rng::below(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // rejection on the top remainder zone keeps the draw unbiased
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return v % bound;
}

namespace {

bool miller_rabin_witness(uint64_t n, uint64_t a, uint64_t d, int r) {
  uint64_t x = powmod(a % n, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < r; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;  // a witnesses compositeness
}

}  // namespace

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // this base set is deterministic for all n < 3.3 * 10^24
  for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (miller_rabin_witness(n, a, d, r)) return false;
  }
  return true;
}

std::vector<uint64_t> primes_in_range(uint64_t lo, uint64_t hi) {
  if (hi < lo) return {};
  constexpr uint64_t kMaxWidth = 1ULL << 26;
  if (hi - lo > kMaxWidth)
    throw std::invalid_argument("primes_in_range: range wider than supported desk scale");
  if (lo < 2) lo = 2;
  uint64_t width = hi - lo + 1;
  std::vector<bool> composite(width, false);
  for (uint64_t p = 2; p <= hi / p; ++p) {
    // tiny base loop; p itself need not be prime for correctness
    uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
    for (uint64_t v = start; v <= hi; v += p) composite[v - lo] = true;
  }
  std::vector<uint64_t> out;
  for (uint64_t i = 0; i < width; ++i)
    if (!composite[i]) out.push_back(lo + i);
  return out;
}

std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n) {
  if (n == 0) throw std::invalid_argument("factorize: n must be positive");
  std::vector<std::pair<uint64_t, uint32_t>> out;
  for (uint64_t p : {2ULL, 3ULL}) {
    if (n % p == 0) {
      uint32_t e = 0;
      while (n % p == 0) n /= p, ++e;
      out.emplace_back(p, e);
    }
  }
  for (uint64_t f = 5, step = 2; f * f <= n; f += step, step = 6 - step) {
    if (n % f == 0) {
      uint32_t e = 0;
      while (n % f == 0) n /= f, ++e;
      out.emplace_back(f, e);
    }
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::vector<uint64_t> divisors(uint64_t n) {
  std::vector<uint64_t> out{1};
  for (auto [p, e] : factorize(n)) {
    size_t base = out.size();
    uint64_t pk = 1;
    for (uint32_t i = 1; i <= e; ++i) {
      pk *= p;
      for (size_t j = 0; j < base; ++j) out.push_back(out[j] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

uint64_t euler_phi(uint64_t n) {
  uint64_t result = n;
  for (auto [p, e] : factorize(n)) {
    (void)e;
    result -= result / p;
  }
  return result;
}

uint64_t random_prime(uint64_t lo, uint64_t hi, Rng& rng) {
  auto primes = primes_in_range(lo, hi);
  if (primes.empty()) throw std::invalid_argument("random_prime: no primes in range");
  return primes[rng.below(primes.size())];
}

int legendre_symbol(int64_t a, uint64_t p) {
  if (p < 3 || !is_prime(p)) throw std::invalid_argument("legendre_symbol: p must be an odd prime");
  uint64_t r = mod_s(a, p);
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

std::optional<uint64_t> sqrt_mod(uint64_t a, uint64_t p) {
  a %= p;
  if (a == 0) return 0;
  if (legendre_symbol(static_cast<int64_t>(a), p) != 1) return std::nullopt;
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  // Tonelli-Shanks
  uint64_t q = p - 1;
  uint32_t s = 0;
  while ((q & 1) == 0) q >>= 1, ++s;
  uint64_t z = 2;
  while (legendre_symbol(static_cast<int64_t>(z), p) != -1) ++z;
  uint64_t m = s;
  uint64_t c = powmod(z, q, p);
  uint64_t t = powmod(a, q, p);
  uint64_t r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    uint64_t i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    uint64_t b = powmod(c, 1ULL << (m - i - 1), p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

uint64_t find_sextic_generator(uint64_t p) {
  if (p < 7 || !is_prime(p)) throw std::invalid_argument("find_sextic_generator: p must be a prime >= 7");
  if (p % 3 != 1)
    throw std::invalid_argument("find_sextic_generator: p = 2 mod 3 has no sextic splitting");
  for (uint64_t g = 2; g < p; ++g) {
    if (powmod(g, (p - 1) / 2, p) != 1 && powmod(g, (p - 1) / 3, p) != 1) return g;
  }
  throw std::logic_error("find_sextic_generator: exhausted F_p (unreachable)");
}

ResidueClassification classify_residue(int64_t d, uint64_t p) {
  if (p < 5 || !is_prime(p)) throw std::invalid_argument("classify_residue: p must be a prime >= 5");
  uint64_t r = mod_s(d, p);
  if (r == 0) throw std::invalid_argument("classify_residue: d = 0 mod p");
  ResidueClassification out;
  out.is_quadratic_residue = powmod(r, (p - 1) / 2, p) == 1;
  if (p % 3 != 1) {
    out.is_cubic_residue = true;  // cubing is a bijection when p = 2 mod 3
    return out;
  }
  out.is_cubic_residue = powmod(r, (p - 1) / 3, p) == 1;
  uint64_t g = find_sextic_generator(p);
  uint64_t ginv = powmod(g, p - 2, p);
  uint64_t v = r;
  for (int i = 0; i < 6; ++i) {
    if (powmod(v, (p - 1) / 6, p) == 1) {
      out.sextic_index = i;
      break;
    }
    v = mulmod(v, ginv, p);
  }
  if (!out.sextic_index) throw std::logic_error("classify_residue: no sextic coset matched");
  return out;
}

GaussRepresentation gauss_representation(uint64_t p) {
  if (p < 7 || !is_prime(p)) throw std::invalid_argument("gauss_representation: p must be a prime >= 7");
  if (p % 3 != 1)
    throw std::invalid_argument("gauss_representation: no a^2 + 3b^2 form for p = 2 mod 3");
  for (uint64_t b = 1; 3 * b * b < p; ++b) {
    uint64_t rem = p - 3 * b * b;
    uint64_t a = isqrt(rem);
    if (a * a == rem) {
      int64_t sa = static_cast<int64_t>(a);
      if (sa % 3 != 1) sa = -sa;
      return GaussRepresentation{sa, static_cast<int64_t>(b), p};
    }
  }
  throw std::logic_error("gauss_representation: not found (unreachable for p = 1 mod 3)");
}

std::optional<uint64_t> hex_form(uint64_t q) {
  if (q == 0) throw std::invalid_argument("hex_form: q must be positive");
  // 3n^2 + 3n + 1 = q  <=>  (6n + 3)^2 = 12q - 3
  uint128 disc = static_cast<uint128>(q) * 12 - 3;
  uint64_t s = isqrt_u128(disc);
  if (static_cast<uint128>(s) * s != disc || s % 6 != 3) return std::nullopt;
  uint64_t n = (s - 3) / 6;
  if (n == 0) return std::nullopt;
  return n;
}

uint32_t Valuation::value() const {
  if (infinite_) throw std::logic_error("Valuation::value: infinite valuation");
  return value_;
}

std::string Valuation::str() const { return infinite_ ? "inf" : std::to_string(value_); }

Valuation valuation(uint64_t p, uint64_t n) {
  if (p < 2 || !is_prime(p)) throw std::invalid_argument("valuation: p must be prime");
  if (n == 0) return Valuation::infinite();
  uint32_t e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  return Valuation::finite(e);
}

uint64_t pillai_gcd_sum(uint64_t k) {
  if (k == 0) throw std::invalid_argument("pillai_gcd_sum: k must be positive");
  uint64_t total = 0;
  for (uint64_t d : divisors(k)) total += d * euler_phi(k / d);
  return total;
}

namespace {

// inverse of a mod m for coprime a, m (extended Euclid)
uint64_t inverse_mod(uint64_t a, uint64_t m) {
  int64_t t = 0, newt = 1;
  int64_t r = static_cast<int64_t>(m), newr = static_cast<int64_t>(a % m);
  while (newr != 0) {
    int64_t q = r / newr;
    std::swap(t -= q * newt, newt);
    std::swap(r -= q * newr, newr);
  }
  if (r != 1) throw std::invalid_argument("inverse_mod: not invertible");
  return mod_s(t, m);
}

}  // namespace

CrtResult crt_combine(const std::vector<std::pair<uint64_t, uint64_t>>& congruences) {
  if (congruences.empty()) throw std::invalid_argument("crt_combine: no congruences");
  CrtResult acc{0, 1};
  for (auto [v, m] : congruences) {
    if (m == 0) throw std::invalid_argument("crt_combine: zero modulus");
    if (std::gcd(acc.modulus, m) != 1)
      throw std::invalid_argument("crt_combine: moduli are not pairwise coprime");
    if (acc.modulus > UINT64_MAX / m) throw std::overflow_error("crt_combine: product exceeds 64 bits");
    // x = acc.value + acc.modulus * t,  t = (v - acc.value) / acc.modulus mod m
    uint64_t minv = inverse_mod(acc.modulus % m, m);
    uint64_t diff = mod_s(static_cast<int64_t>((v % m) - (acc.value % m)), m);
    uint64_t t = mulmod(diff, minv, m);
    acc.value += acc.modulus * t;
    acc.modulus *= m;
  }
  return acc;
}

}  // namespace bachet
