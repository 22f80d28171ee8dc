#include "bachet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>

#include "bachet/curves.hpp"

namespace bachet {

const char* to_string(Weighting w) {
  return w == Weighting::pair_uniform ? "pairs" : "exact";
}

const char* to_string(TrialCase c) {
  switch (c) {
    case TrialCase::both_anomalous: return "both_anomalous";
    case TrialCase::case1: return "case1";
    case TrialCase::case2: return "case2";
    case TrialCase::case3: return "case3";
  }
  return "?";
}

namespace {

std::mutex dist_mutex;
std::map<uint64_t, std::map<int64_t, uint64_t>> dist_cache;

std::map<int64_t, uint64_t> compute_trace_distribution(uint64_t p) {
  // chi table gives O(1) point-count increments; total work O(p^3)
  std::vector<int8_t> chi(p, -1);
  chi[0] = 0;
  for (uint64_t x = 1; x <= (p - 1) / 2; ++x) chi[mulmod(x, x, p)] = 1;

  std::map<int64_t, uint64_t> counts;
  uint64_t singular = 0;
  std::vector<uint64_t> fx(p);
  for (uint64_t c = 0; c < p; ++c) {
    for (uint64_t x = 0; x < p; ++x)
      fx[x] = (mulmod(mulmod(x, x, p), x, p) + mulmod(c, x, p)) % p;
    uint64_t c3 = mulmod(4, mulmod(mulmod(c, c, p), c, p), p);
    for (uint64_t d = 0; d < p; ++d) {
      if ((c3 + mulmod(27, mulmod(d, d, p), p)) % p == 0) {
        ++singular;
        continue;
      }
      int64_t sum = 0;
      for (uint64_t x = 0; x < p; ++x) {
        uint64_t v = fx[x] + d;
        if (v >= p) v -= p;
        sum += chi[v];
      }
      ++counts[-sum];  // trace = p + 1 - (p + 1 + sum)
    }
  }
  if (singular != p)
    throw std::logic_error("trace_distribution_exact: singular locus is not exactly p pairs");
  uint64_t total = 0;
  for (auto& [t, cnt] : counts) total += cnt;
  if (total != p * p - p)
    throw std::logic_error("trace_distribution_exact: counts do not sum to p^2 - p");
  return counts;
}

}  // namespace

const std::map<int64_t, uint64_t>& trace_distribution_exact(uint64_t p, uint64_t bound) {
  if (p < 5 || !is_prime(p))
    throw std::invalid_argument("trace_distribution_exact: p must be a prime >= 5");
  if (p > bound)
    throw std::invalid_argument(
        "trace_distribution_exact: p above the exact-mode bound; use pair-uniform weighting");
  std::lock_guard<std::mutex> lock(dist_mutex);
  auto it = dist_cache.find(p);
  if (it == dist_cache.end()) it = dist_cache.emplace(p, compute_trace_distribution(p)).first;
  return it->second;
}

std::vector<std::pair<int64_t, int64_t>> valid_trace_pairs(uint64_t p, uint64_t q) {
  if (p < 5 || q < 5 || p == q || !is_prime(p) || !is_prime(q))
    throw std::invalid_argument("valid_trace_pairs: p, q must be distinct primes >= 5");
  if (p > (1ULL << 31) || q > (1ULL << 31))
    throw std::invalid_argument("valid_trace_pairs: primes above desk scale");
  int64_t hp = static_cast<int64_t>(isqrt(4 * p));
  int64_t hq = static_cast<int64_t>(isqrt(4 * q));
  int64_t n1 = static_cast<int64_t>(p * q) + 1;
  std::vector<std::pair<int64_t, int64_t>> out;
  for (int64_t tp = -hp; tp <= hp; ++tp) {
    int64_t mp = static_cast<int64_t>(p) + 1 - tp;
    // val = n + 1 - tp*tq steps by -tp as tq increases; track val mod mp
    // incrementally and pay one division per pair for the mod-mq test
    int64_t val = n1 - tp * (-hq);
    int64_t rem = ((val % mp) + mp) % mp;
    int64_t step = ((tp % mp) + mp) % mp;  // subtracted per unit tq
    for (int64_t tq = -hq; tq <= hq; ++tq) {
      if (rem == 0 && val % (static_cast<int64_t>(q) + 1 - tq) == 0) out.emplace_back(tp, tq);
      val -= tp;
      rem -= step;
      if (rem < 0) rem += mp;
    }
  }
  return out;
}

namespace {

// (p+1-t_p)(q+1-t_q) = pq + 1 - t_p t_q
bool order_product_equality(uint64_t p, uint64_t q, int64_t tp, int64_t tq) {
  int128 lhs = static_cast<int128>(static_cast<int64_t>(p) + 1 - tp) *
               (static_cast<int64_t>(q) + 1 - tq);
  int128 rhs = static_cast<int128>(p) * q + 1 - static_cast<int128>(tp) * tq;
  return lhs == rhs;
}

}  // namespace

TrialCase classify_trial(uint64_t p, uint64_t q, int64_t t_p, int64_t t_q) {
  if (t_p == 1 && t_q == 1) return TrialCase::both_anomalous;
  if (t_p == 1 || t_q == 1) return TrialCase::case1;
  return order_product_equality(p, q, t_p, t_q) ? TrialCase::case3 : TrialCase::case2;
}

namespace {

// weight of one (t_p, t_q) pair under the chosen measure
uint64_t pair_weight(Weighting w, uint64_t p, uint64_t q, int64_t tp, int64_t tq,
                     uint64_t exact_bound) {
  if (w == Weighting::pair_uniform) return 1;
  const auto& dp = trace_distribution_exact(p, exact_bound);
  const auto& dq = trace_distribution_exact(q, exact_bound);
  auto ip = dp.find(tp);
  auto iq = dq.find(tq);
  if (ip == dp.end() || iq == dq.end()) return 0;
  return ip->second * iq->second;
}

}  // namespace

EqualityProbability conditional_equality_probability(uint64_t p, uint64_t q, Weighting w,
                                                     uint64_t exact_bound) {
  auto pairs = valid_trace_pairs(p, q);
  EqualityProbability out;
  for (auto [tp, tq] : pairs) {
    uint64_t weight = pair_weight(w, p, q, tp, tq, exact_bound);
    out.total += weight;
    if (order_product_equality(p, q, tp, tq)) out.favorable += weight;
  }
  if (out.total == 0)
    throw std::logic_error("conditional_equality_probability: no admissible pairs (unreachable)");
  return out;
}

std::vector<OdcTrial> run_odc_trials(uint64_t N, uint32_t trials, uint64_t seed, Weighting w,
                                     uint64_t exact_bound) {
  if (N < 7) throw std::invalid_argument("run_odc_trials: N must be >= 7");
  if (trials == 0) throw std::invalid_argument("run_odc_trials: trials must be positive");
  auto primes = primes_in_range(5, N);
  if (primes.size() < 2) throw std::invalid_argument("run_odc_trials: fewer than two primes <= N");

  std::vector<OdcTrial> out(trials);
  for (uint32_t i = 0; i < trials; ++i) {
    // substream fixed by (seed, N, i); evaluation order is irrelevant
    Rng rng(Rng::mix(Rng::mix(seed ^ Rng::mix(N)) ^ i));
    uint64_t ip = rng.below(primes.size());
    uint64_t iq = rng.below(primes.size() - 1);
    if (iq >= ip) ++iq;
    uint64_t p = primes[ip], q = primes[iq];

    auto pairs = valid_trace_pairs(p, q);
    size_t chosen;
    if (w == Weighting::pair_uniform) {
      chosen = rng.below(pairs.size());
    } else {
      uint64_t total = 0;
      std::vector<uint64_t> cumulative(pairs.size());
      for (size_t j = 0; j < pairs.size(); ++j) {
        total += pair_weight(w, p, q, pairs[j].first, pairs[j].second, exact_bound);
        cumulative[j] = total;
      }
      uint64_t r = rng.below(total);
      chosen = std::lower_bound(cumulative.begin(), cumulative.end(), r + 1) - cumulative.begin();
    }

    OdcTrial& trial = out[i];
    trial.p = p;
    trial.q = q;
    trial.t_p = pairs[chosen].first;
    trial.t_q = pairs[chosen].second;
    trial.divisible = true;  // drawn from the admissible set
    trial.equality = order_product_equality(p, q, trial.t_p, trial.t_q);
    trial.label = classify_trial(p, q, trial.t_p, trial.t_q);
  }
  return out;
}

OdcTable odc_table(const std::vector<uint64_t>& Ns, uint32_t trials, uint64_t seed, Weighting w,
                   uint64_t exact_bound) {
  if (trials == 0) throw std::invalid_argument("odc_table: trials must be positive");
  OdcTable table;
  for (uint64_t N : Ns) {
    auto ts = run_odc_trials(N, trials, seed, w, exact_bound);
    OdcRow row;
    row.N = N;
    row.trials = trials;
    for (const auto& t : ts) row.successes += t.equality ? 1 : 0;
    row.estimate = static_cast<double>(row.successes) / trials;
    row.ci_halfwidth = 1.96 * std::sqrt(row.estimate * (1.0 - row.estimate) / trials);
    row.seed = seed;
    row.weighting = w;
    table.rows.push_back(row);
  }
  return table;
}

std::string odc_table_csv(const OdcTable& table) {
  std::string out = "N,trials,estimate,ci_halfwidth,seed,weighting\n";
  char buf[160];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof(buf), "%llu,%u,%.6f,%.6f,%llu,%s\n",
                  static_cast<unsigned long long>(r.N), r.trials, r.estimate, r.ci_halfwidth,
                  static_cast<unsigned long long>(r.seed), to_string(r.weighting));
    out += buf;
  }
  return out;
}

}  // namespace bachet
