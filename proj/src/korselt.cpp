#include "bachet/korselt.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "bachet/anomalous.hpp"

namespace bachet {

namespace {

uint64_t abs_diff(int64_t v, int64_t w) {
  return v >= w ? static_cast<uint64_t>(v - w) : static_cast<uint64_t>(w - v);
}

// a_{p^e} by the Hecke recurrence a_{p^{k+1}} = a_p a_{p^k} - p a_{p^{k-1}}
int128 prime_power_coeff(int64_t ap, uint64_t p, uint32_t e) {
  int128 prev = 1, cur = ap;
  for (uint32_t k = 2; k <= e; ++k) {
    int128 next = static_cast<int128>(ap) * cur - static_cast<int128>(p) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

int64_t a_coeff(int64_t c, int64_t d, uint64_t n) {
  if (n == 0) throw std::invalid_argument("a_coeff: n must be positive");
  int128 acc = 1;
  for (auto [p, e] : factorize(n)) {
    if (p < 5 || !good_reduction(p, c, d))
      throw std::invalid_argument("a_coeff: bad reduction at p=" + std::to_string(p));
    int64_t ap = trace(p, c, d);
    int128 factor = prime_power_coeff(ap, p, e);
    if (__builtin_mul_overflow(acc, factor, &acc))
      throw std::overflow_error("a_coeff: coefficient exceeds 128 bits");
  }
  if (acc > INT64_MAX || acc < INT64_MIN)
    throw std::overflow_error("a_coeff: coefficient exceeds 64 bits");
  return static_cast<int64_t>(acc);
}

KorseltReport korselt_type1_check(int64_t c, int64_t d, uint64_t n) {
  if (n < 2) throw std::invalid_argument("korselt_type1_check: n must be >= 2");
  auto factors = factorize(n);
  for (auto [p, e] : factors) {
    (void)e;
    if (p < 5)
      throw std::invalid_argument("korselt_type1_check: prime factor " + std::to_string(p) +
                                  " below 5 is outside the criterion's scope");
  }

  KorseltReport rep;
  rep.n = n;
  rep.c = c;
  rep.d = d;

  bool all_good = true;
  for (auto [p, e] : factors) {
    PrimeCondition pc;
    pc.p = p;
    pc.multiplicity = e;
    pc.good_reduction = good_reduction(p, c, d);
    all_good = all_good && pc.good_reduction;
    rep.per_prime.push_back(pc);
  }
  if (!all_good) {
    rep.verdict = false;
    rep.reason = "bad reduction at some prime factor";
    return rep;
  }

  rep.a_n = a_coeff(c, d, n);
  int128 target = static_cast<int128>(n) + 1 - rep.a_n;  // n + 1 - a_n > 0 by Hasse
  bool all_conditions = true;
  for (auto& pc : rep.per_prime) {
    pc.a_p = trace(pc.p, c, d);
    pc.m_p = static_cast<uint64_t>(static_cast<int64_t>(pc.p) + 1 - pc.a_p);
    pc.divides = target % static_cast<int128>(pc.m_p) == 0;
    pc.ap_one_mod_p = mod_s(pc.a_p, pc.p) == 1;
    int64_t threshold =
        static_cast<int64_t>(valuation(pc.p, n).value()) - (pc.ap_one_mod_p ? 0 : 1);
    pc.ord_condition = valuation(pc.p, abs_diff(rep.a_n, 1)).at_least(threshold);
    all_conditions = all_conditions && pc.divides && pc.ord_condition;
  }

  if (factors.size() < 2) {
    rep.verdict = false;
    rep.reason = "fewer than two distinct prime factors";
    return rep;
  }
  rep.verdict = all_conditions;
  return rep;
}

bool korselt_two_prime_check(int64_t c, int64_t d, uint64_t p, uint64_t q) {
  if (p == q) throw std::invalid_argument("korselt_two_prime_check: p and q must be distinct");
  if (p < 7 || q < 7 || !is_prime(p) || !is_prime(q))
    throw std::invalid_argument("korselt_two_prime_check: p and q must be primes >= 7");
  if (!good_reduction(p, c, d) || !good_reduction(q, c, d))
    throw std::invalid_argument("korselt_two_prime_check: bad reduction at p or q");
  int64_t ap = trace(p, c, d), aq = trace(q, c, d);
  int128 target = static_cast<int128>(p) * q + 1 - static_cast<int128>(ap) * aq;
  int64_t mp = static_cast<int64_t>(p) + 1 - ap;
  int64_t mq = static_cast<int64_t>(q) + 1 - aq;
  return target % mp == 0 && target % mq == 0;
}

CurveParams build_anomalous_product_curve(const std::vector<uint64_t>& primes) {
  if (primes.empty())
    throw std::invalid_argument("build_anomalous_product_curve: need at least one prime");
  std::vector<uint64_t> sorted = primes;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] < 5 || !is_prime(sorted[i]))
      throw std::invalid_argument("build_anomalous_product_curve: entries must be primes >= 5");
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw std::invalid_argument("build_anomalous_product_curve: duplicate prime");
    if (sorted[i] > (1ULL << 20))
      throw std::invalid_argument("build_anomalous_product_curve: prime above desk scale");
  }

  bool all_hex = std::all_of(sorted.begin(), sorted.end(),
                             [](uint64_t p) { return hex_form(p).has_value(); });

  std::vector<std::pair<uint64_t, uint64_t>> c_cong, d_cong;
  for (uint64_t p : sorted) {
    if (all_hex) {
      auto dw = find_anomalous_D(p);
      if (!dw) throw std::logic_error("build_anomalous_product_curve: hex prime without witness");
      c_cong.emplace_back(0, p);
      d_cong.emplace_back(*dw, p);
      continue;
    }
    // Deuring guarantees a trace-1 curve mod p; first (c, d) in scan order
    bool found = false;
    for (uint64_t cv = 0; cv < p && !found; ++cv) {
      for (uint64_t dv = 0; dv < p && !found; ++dv) {
        if (!good_reduction(p, static_cast<int64_t>(cv), static_cast<int64_t>(dv))) continue;
        if (count_points(p, static_cast<int64_t>(cv), static_cast<int64_t>(dv)) == p) {
          c_cong.emplace_back(cv, p);
          d_cong.emplace_back(dv, p);
          found = true;
        }
      }
    }
    if (!found)
      throw std::logic_error("build_anomalous_product_curve: no anomalous curve mod " +
                             std::to_string(p));
  }

  CrtResult cc = crt_combine(c_cong);
  CrtResult dd = crt_combine(d_cong);
  return CurveParams{cc.modulus, static_cast<int64_t>(cc.value), static_cast<int64_t>(dd.value)};
}

const char* to_string(SilvCondition c) {
  switch (c) {
    case SilvCondition::C1: return "C1";
    case SilvCondition::C2: return "C2";
    case SilvCondition::C3: return "C3";
  }
  return "?";
}

std::set<SilvCondition> gen_silv_classify(int64_t c, int64_t d, uint64_t n) {
  auto factors = factorize(n);
  if (factors.size() < 2)
    throw std::invalid_argument("gen_silv_classify: n needs at least two prime factors");
  for (auto [p, e] : factors) {
    if (p < 5) throw std::invalid_argument("gen_silv_classify: prime factor below 5");
    if (e > 1) throw std::invalid_argument("gen_silv_classify: n must be square-free");
  }
  KorseltReport rep = korselt_type1_check(c, d, n);
  if (!rep.verdict)
    throw std::invalid_argument("gen_silv_classify: n is not Type I Korselt for this curve");

  size_t m = factors.size();
  uint64_t pm = factors.back().first;
  uint128 lead = 1;  // p_1 ... p_{m-1}
  for (size_t i = 0; i + 1 < m; ++i) lead *= factors[i].first;
  uint128 four_m = static_cast<uint128>(1) << (2 * m);

  std::set<SilvCondition> out;
  if (lead <= four_m) out.insert(SilvCondition::C1);

  int64_t a_pm = trace(pm, c, d);
  if (a_pm == 1) {
    int minus_ones = 0;
    bool all_unit = true;
    for (size_t i = 0; i + 1 < m; ++i) {
      int64_t ai = trace(factors[i].first, c, d);
      if (ai == -1)
        ++minus_ones;
      else if (ai != 1)
        all_unit = false;
    }
    if (all_unit && minus_ones % 2 == 0) out.insert(SilvCondition::C2);
  }

  // lead >= sqrt(pm) / 4^m  <=>  (lead * 4^m)^2 >= pm
  uint128 scaled = lead * four_m;
  if (scaled >= (1ULL << 32) || scaled * scaled >= pm) out.insert(SilvCondition::C3);
  return out;
}

namespace {

// verdict of k P = O over Z/m, splitting m at every surfaced factor so the
// answer matches the CRT group even when affine coordinates cannot express
// an intermediate point
bool scalar_kills_point(uint64_t m, int64_t c, int64_t d, uint64_t k, const CurvePoint& pt,
                        std::set<uint64_t>& factors_found) {
  if (m == 1) return true;
  CurveParams curve{m, c, d};
  CurvePoint reduced = pt.at_infinity ? pt : CurvePoint::affine(pt.x % m, pt.y % m);
  auto r = scalar_mul(curve, k, reduced);
  if (std::holds_alternative<CurvePoint>(r)) return std::get<CurvePoint>(r).at_infinity;
  uint64_t g = std::get<FoundFactor>(r).factor;
  factors_found.insert(g);
  return scalar_kills_point(g, c, d, k, reduced, factors_found) &&
         scalar_kills_point(m / g, c, d, k, reduced, factors_found);
}

}  // namespace

PseudoprimeResult elliptic_pseudoprime_check(const CurveParams& curve, const CurvePoint& pt) {
  uint64_t n = curve.modulus;
  if (n < 2) throw std::invalid_argument("elliptic_pseudoprime_check: modulus must be >= 2");
  auto factors = factorize(n);
  if (factors.size() < 2)
    throw std::invalid_argument(
        "elliptic_pseudoprime_check: n must have at least two distinct prime factors");
  for (auto [p, e] : factors) {
    (void)e;
    if (p < 5 || !good_reduction(p, curve.c, curve.d))
      throw std::invalid_argument("elliptic_pseudoprime_check: bad reduction at p=" +
                                  std::to_string(p));
  }
  if (!is_on_curve(curve, pt))
    throw std::invalid_argument("elliptic_pseudoprime_check: point is not on the curve");

  int64_t an = a_coeff(curve.c, curve.d, n);
  int128 k128 = static_cast<int128>(n) + 1 - an;
  if (k128 < 0 || k128 > static_cast<int128>(UINT64_MAX))
    throw std::overflow_error("elliptic_pseudoprime_check: scalar out of range");

  PseudoprimeResult res;
  res.scalar = static_cast<uint64_t>(k128);
  std::set<uint64_t> found;
  res.is_pseudoprime = scalar_kills_point(n, curve.c, curve.d, res.scalar, pt, found);
  res.factors_found.assign(found.begin(), found.end());
  return res;
}

std::vector<std::pair<uint64_t, uint64_t>> korselt_search(int64_t c, int64_t d, uint64_t bound) {
  if (bound < 35) throw std::invalid_argument("korselt_search: bound must be >= 35");
  std::map<uint64_t, int64_t> trace_memo;
  auto memo_trace = [&](uint64_t p) {
    auto it = trace_memo.find(p);
    if (it != trace_memo.end()) return it->second;
    int64_t t = trace(p, c, d);
    trace_memo.emplace(p, t);
    return t;
  };

  auto primes = primes_in_range(7, bound / 7);
  std::vector<std::pair<uint64_t, uint64_t>> out;
  for (size_t i = 0; i < primes.size(); ++i) {
    uint64_t p = primes[i];
    if (p * p > bound) break;
    if (!good_reduction(p, c, d)) continue;
    int64_t ap = memo_trace(p);
    int64_t mp = static_cast<int64_t>(p) + 1 - ap;
    for (size_t j = i + 1; j < primes.size() && primes[j] <= bound / p; ++j) {
      uint64_t q = primes[j];
      if (!good_reduction(q, c, d)) continue;
      int64_t aq = memo_trace(q);
      int128 target = static_cast<int128>(p) * q + 1 - static_cast<int128>(ap) * aq;
      if (target % mp == 0 && target % (static_cast<int64_t>(q) + 1 - aq) == 0)
        out.emplace_back(p, q);
    }
  }
  std::sort(out.begin(), out.end(),
            [](auto& a, auto& b) { return a.first * a.second < b.first * b.second; });
  return out;
}

CurvePoint sample_point(const CurveParams& curve, Rng& rng) {
  uint64_t n = curve.modulus;
  auto factors = factorize(n);
  for (auto [p, e] : factors) {
    if (p < 5) throw std::invalid_argument("sample_point: modulus has a prime factor below 5");
    if (e > 1) throw std::invalid_argument("sample_point: modulus must be square-free");
  }
  for (int attempt = 0; attempt < 4096; ++attempt) {
    uint64_t x = rng.below(n);
    std::vector<std::pair<uint64_t, uint64_t>> ys;
    bool ok = true;
    for (auto [p, e] : factors) {
      (void)e;
      uint64_t fx = (mulmod(mulmod(x, x, p), x, p) + mulmod(mod_s(curve.c, p), x, p) +
                     mod_s(curve.d, p)) %
                    p;
      auto root = sqrt_mod(fx, p);
      if (!root) {
        ok = false;
        break;
      }
      uint64_t y = *root;
      if (y != 0 && (rng.next() & 1)) y = p - y;
      ys.emplace_back(y, p);
    }
    if (!ok) continue;
    CrtResult lifted = crt_combine(ys);
    CurvePoint pt = CurvePoint::affine(x, lifted.value);
    if (!is_on_curve(curve, pt)) throw std::logic_error("sample_point: lifted point off curve");
    return pt;
  }
  throw std::runtime_error("sample_point: no point found after many attempts");
}

}  // namespace bachet
