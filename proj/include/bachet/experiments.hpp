#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bachet/numtheory.hpp"

namespace bachet {

enum class Weighting {
  pair_uniform,  // every admissible (t_p, t_q) pair weighs 1
  curve_exact,   // pair weighted by exact counts of curves with those traces
};

const char* to_string(Weighting w);

enum class TrialCase { both_anomalous, case1, case2, case3 };

const char* to_string(TrialCase c);

// One sampled experiment trial: distinct primes, traces drawn from the
// admissible pairs, and whether the order product equals n + 1 - a_n.
struct OdcTrial {
  uint64_t p = 0;
  uint64_t q = 0;
  int64_t t_p = 0;
  int64_t t_q = 0;
  bool divisible = false;
  bool equality = false;
  TrialCase label = TrialCase::case2;
};

struct OdcRow {
  uint64_t N = 0;
  uint32_t trials = 0;
  uint32_t successes = 0;
  double estimate = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 sqrt(e(1-e)/trials)
  uint64_t seed = 0;
  Weighting weighting = Weighting::pair_uniform;
};

struct OdcTable {
  std::vector<OdcRow> rows;
};

// Enumerating every pair mod p is O(p^3); above this bound callers must use
// pair-uniform weighting.
inline constexpr uint64_t kDefaultExactBound = 512;

// Number of nonsingular (c, d) mod p per trace value; the counts sum to
// p^2 - p (the singular locus, exactly p pairs, is verified during the
// enumeration). Memoized.
const std::map<int64_t, uint64_t>& trace_distribution_exact(uint64_t p,
                                                            uint64_t bound = kDefaultExactBound);

// All (t_p, t_q) in the Hasse boxes with p+1-t_p and q+1-t_q both dividing
// pq+1-t_p t_q. Ordered by t_p then t_q; always contains (1, 1).
std::vector<std::pair<int64_t, int64_t>> valid_trace_pairs(uint64_t p, uint64_t q);

struct EqualityProbability {
  uint64_t favorable = 0;
  uint64_t total = 0;
  double value() const { return static_cast<double>(favorable) / static_cast<double>(total); }
};

// Pr[(p+1-t_p)(q+1-t_q) = pq+1-t_p t_q] over the admissible pairs under the
// chosen weighting, as an exact ratio.
EqualityProbability conditional_equality_probability(uint64_t p, uint64_t q, Weighting w,
                                                     uint64_t exact_bound = kDefaultExactBound);

TrialCase classify_trial(uint64_t p, uint64_t q, int64_t t_p, int64_t t_q);

// The trial stream is derived from (seed, N, trial index) only, so results
// do not depend on evaluation order.
std::vector<OdcTrial> run_odc_trials(uint64_t N, uint32_t trials, uint64_t seed, Weighting w,
                                     uint64_t exact_bound = kDefaultExactBound);

OdcTable odc_table(const std::vector<uint64_t>& Ns, uint32_t trials, uint64_t seed, Weighting w,
                   uint64_t exact_bound = kDefaultExactBound);

// CSV with header N,trials,estimate,ci_halfwidth,seed,weighting; byte-stable
// across runs with equal parameters.
std::string odc_table_csv(const OdcTable& table);

}  // namespace bachet
