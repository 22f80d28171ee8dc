// bachet: trace/order/twist structure of y^2 = x^3 + cx + d over prime
// fields, anomalous prime and prime-square certification, the Type I
// elliptic Korselt criterion, and the seeded divisibility experiment.
//
// Every subcommand prints one OutputEnvelope on stdout:
//   {command, parameters, result, artifact_version}
// Identical invocations produce byte-identical output (fixed key order, no
// timestamps). Long scans report progress on stderr only.
//
// Exit codes: 0 success, 1 domain error (message names the violated
// precondition), 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "bachet/anomalous.hpp"
#include "bachet/curves.hpp"
#include "bachet/experiments.hpp"
#include "bachet/korselt.hpp"
#include "bachet/numtheory.hpp"

using json = nlohmann::ordered_json;
using namespace bachet;

namespace {

constexpr const char* kArtifactVersion = "0.1.0";
constexpr uint64_t kDefaultSeed = 1729;

uint64_t exact_bound_from_env() {
  const char* env = std::getenv("BACHET_EXACT_BOUND");
  if (!env) return kDefaultExactBound;
  return std::strtoull(env, nullptr, 10);
}

Weighting parse_weighting(const std::string& s) {
  return s == "exact" ? Weighting::curve_exact : Weighting::pair_uniform;
}

// --- output rendering --------------------------------------------------------

struct CsvTable {
  std::string header;
  std::vector<std::string> rows;
};

void flatten_json(const json& value, const std::string& prefix, CsvTable& out) {
  if (value.is_object()) {
    for (auto it = value.begin(); it != value.end(); ++it)
      flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (value.is_array()) {
    size_t i = 0;
    for (const auto& item : value) flatten_json(item, prefix + "." + std::to_string(i++), out);
  } else {
    out.rows.push_back(prefix + "," +
                       (value.is_string() ? value.get<std::string>() : value.dump()));
  }
}

// default CSV rendering: key,value rows over the flattened result record
CsvTable generic_csv(const json& result) {
  CsvTable table;
  table.header = "key,value";
  flatten_json(result, "", table);
  return table;
}

void print_text(const json& value, const std::string& prefix) {
  if (value.is_object()) {
    for (auto it = value.begin(); it != value.end(); ++it)
      print_text(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
  } else if (value.is_array()) {
    size_t i = 0;
    for (const auto& item : value) print_text(item, prefix + "[" + std::to_string(i++) + "]");
  } else {
    std::cout << prefix << ": " << (value.is_string() ? value.get<std::string>() : value.dump())
              << "\n";
  }
}

struct Emitter {
  std::string format = "json";

  void emit(const std::string& command, const json& parameters, const json& result,
            const CsvTable* table = nullptr) const {
    if (format == "json") {
      json envelope;
      envelope["command"] = command;
      envelope["parameters"] = parameters;
      envelope["result"] = result;
      envelope["artifact_version"] = kArtifactVersion;
      std::cout << envelope.dump(2) << "\n";
    } else if (format == "csv") {
      CsvTable generic;
      if (!table) {
        generic = generic_csv(result);
        table = &generic;
      }
      std::cout << table->header << "\n";
      for (const auto& row : table->rows) std::cout << row << "\n";
    } else {
      std::cout << "command: " << command << "\n";
      print_text(result, "");
    }
  }
};

// --- record builders ---------------------------------------------------------

json spectrum_record(const TwistSpectrum& s) {
  json rec;
  rec["p"] = s.p;
  rec["g"] = s.g;
  rec["traces"] = s.traces;
  rec["orders"] = s.orders;
  return rec;
}

json certificate_record(const AnomalousCertificate& c) {
  json rec;
  rec["p"] = c.p;
  rec["n"] = c.n;
  rec["a"] = c.a;
  rec["b"] = c.b;
  rec["t"] = c.t;
  rec["lifted"] = c.lifted;
  rec["oracle_checked"] = c.oracle_checked;
  return rec;
}

json korselt_record(const KorseltReport& rep) {
  json rec;
  rec["n"] = rep.n;
  rec["c"] = rep.c;
  rec["d"] = rep.d;
  rec["a_n"] = rep.a_n;
  rec["verdict"] = rep.verdict;
  if (!rep.reason.empty()) rec["reason"] = rep.reason;
  json per = json::array();
  for (const auto& pc : rep.per_prime) {
    json row;
    row["p"] = pc.p;
    row["multiplicity"] = pc.multiplicity;
    row["a_p"] = pc.a_p;
    row["m_p"] = pc.m_p;
    row["good_reduction"] = pc.good_reduction;
    row["divides"] = pc.divides;
    row["ord_condition"] = pc.ord_condition;
    row["ap_one_mod_p"] = pc.ap_one_mod_p;
    per.push_back(row);
  }
  rec["per_prime"] = per;
  return rec;
}

json odc_record(const OdcTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row;
    row["N"] = r.N;
    row["trials"] = r.trials;
    row["successes"] = r.successes;
    row["estimate"] = r.estimate;
    row["ci_halfwidth"] = r.ci_halfwidth;
    row["seed"] = r.seed;
    row["weighting"] = to_string(r.weighting);
    rows.push_back(row);
  }
  return json{{"rows", rows}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bachet curves: anomalous primes and the elliptic Korselt criterion"};
  app.require_subcommand(1);

  Emitter emitter;
  app.add_option("--format", emitter.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "text"}))
      ->capture_default_str();

  uint64_t p = 0, q = 0, n = 0, bound = 0, limit = 0, seed = kDefaultSeed;
  int64_t c = 0, d = 1;
  uint32_t count = 8, trials = 1000;
  uint64_t px = 0, py = 0;
  std::string weighting_name = "pairs";
  std::vector<uint64_t> ns_list;

  auto* cmd_trace = app.add_subcommand("trace", "Trace of Frobenius at p");
  cmd_trace->add_option("--p", p)->required();
  cmd_trace->add_option("--c", c);
  cmd_trace->add_option("--d", d);

  auto* cmd_order = app.add_subcommand("order", "#E(F_p)");
  cmd_order->add_option("--p", p)->required();
  cmd_order->add_option("--c", c);
  cmd_order->add_option("--d", d);

  auto* cmd_twists = app.add_subcommand("twists", "Sextic twist traces and orders at p");
  cmd_twists->add_option("--p", p)->required();
  cmd_twists->add_option("--d", d);

  auto* cmd_cand = app.add_subcommand("candidates", "Possible Bachet orders at p");
  cmd_cand->add_option("--p", p)->required();

  auto* cmd_anom = app.add_subcommand("anomalous", "Bachet anomalous primes and squares");
  cmd_anom->require_subcommand(1);
  auto* cmd_findd = cmd_anom->add_subcommand("find-d", "Smallest D with #E(F_p) = p");
  cmd_findd->add_option("--p", p)->required();
  auto* cmd_primes = cmd_anom->add_subcommand("primes", "Bachet anomalous primes up to a limit");
  cmd_primes->add_option("--limit", limit)->required();
  auto* cmd_squares =
      cmd_anom->add_subcommand("squares", "Certificates for prime entries of the Pell sequence");
  cmd_squares->add_option("--count", count)->capture_default_str();

  auto* cmd_pell = app.add_subcommand("pell", "Solutions of p^2 = 3n^2 + 3n + 1");
  cmd_pell->add_option("--count", count)->capture_default_str();

  auto* cmd_korselt = app.add_subcommand("korselt", "Type I elliptic Korselt criterion");
  cmd_korselt->require_subcommand(1);
  auto* cmd_check = cmd_korselt->add_subcommand("check", "Full per-prime condition breakdown");
  auto* opt_n = cmd_check->add_option("--n", n, "Composite to test");
  cmd_check->add_option("--p", p, "With --q: divisibility-only two-prime check")->excludes(opt_n);
  cmd_check->add_option("--q", q, "Second prime for the two-prime check");
  cmd_check->add_option("--c", c);
  cmd_check->add_option("--d", d);
  auto* cmd_search = cmd_korselt->add_subcommand("search", "Semiprime Korselt scan");
  cmd_search->add_option("--bound", bound)->required();
  cmd_search->add_option("--c", c);
  cmd_search->add_option("--d", d);

  auto* cmd_classify = app.add_subcommand("classify", "gen_silv conditions for a Korselt n");
  cmd_classify->add_option("--n", n)->required();
  cmd_classify->add_option("--c", c);
  cmd_classify->add_option("--d", d);

  auto* cmd_pseudo = app.add_subcommand("pseudoprime", "(n + 1 - a_n) P = O test over Z/n");
  cmd_pseudo->add_option("--n", n)->required();
  cmd_pseudo->add_option("--c", c);
  cmd_pseudo->add_option("--d", d);
  auto* opt_y = cmd_pseudo->add_option("--y", py);
  cmd_pseudo->add_option("--x", px)->needs(opt_y);
  cmd_pseudo->add_option("--seed", seed);

  auto* cmd_exp = app.add_subcommand("experiment", "Monte-Carlo experiments");
  cmd_exp->require_subcommand(1);
  auto* cmd_odc = cmd_exp->add_subcommand("odc", "Order-divisibility equality experiment");
  cmd_odc->add_option("--ns", ns_list, "Values of N")->required()->delimiter(',');
  cmd_odc->add_option("--trials", trials)->capture_default_str();
  cmd_odc->add_option("--seed", seed)->capture_default_str();
  cmd_odc->add_option("--weighting", weighting_name)
      ->check(CLI::IsMember({"exact", "pairs"}))
      ->capture_default_str();

  auto* cmd_density = app.add_subcommand("density", "Anomalous prime count up to a bound");
  cmd_density->add_option("--d", d);
  cmd_density->add_option("--bound", bound)->required();

  // let --format (and other app-level flags) appear after the subcommand
  for (CLI::App* sub : {cmd_trace, cmd_order, cmd_twists, cmd_cand, cmd_anom, cmd_findd,
                        cmd_primes, cmd_squares, cmd_pell, cmd_korselt, cmd_check, cmd_search,
                        cmd_classify, cmd_pseudo, cmd_exp, cmd_odc, cmd_density})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  auto usage_error = [](const std::string& msg) {
    std::cerr << msg << "\n";
    return 2;
  };

  try {
    if (*cmd_trace) {
      json params{{"p", p}, {"c", c}, {"d", d}};
      emitter.emit("trace", params, json{{"trace", trace(p, c, d)}});
    } else if (*cmd_order) {
      json params{{"p", p}, {"c", c}, {"d", d}};
      emitter.emit("order", params, json{{"order", count_points(p, c, d)}});
    } else if (*cmd_twists) {
      json params{{"p", p}, {"d", d}};
      emitter.emit("twists", params, spectrum_record(twist_spectrum(p, d)));
    } else if (*cmd_cand) {
      json params{{"p", p}};
      emitter.emit("candidates", params, json{{"p", p}, {"orders", order_candidates(p)}});
    } else if (*cmd_findd) {
      json params{{"p", p}};
      auto dw = find_anomalous_D(p);
      emitter.emit("anomalous find-d", params,
                   json{{"p", p}, {"d", dw ? json(*dw) : json(nullptr)}});
    } else if (*cmd_primes) {
      json params{{"limit", limit}};
      json list = json::array();
      CsvTable table;
      table.header = "p,n,d";
      for (uint64_t hn = 1;; ++hn) {
        uint64_t hp = 3 * hn * hn + 3 * hn + 1;
        if (hp > limit) break;
        if (!is_prime(hp)) continue;
        json row{{"p", hp}, {"n", hn}};
        std::string dcell;
        if (hp <= kAnomalousVerifyBound) {
          auto dw = find_anomalous_D(hp);
          row["d"] = dw ? json(*dw) : json(nullptr);
          if (dw) dcell = std::to_string(*dw);
        }
        table.rows.push_back(std::to_string(hp) + "," + std::to_string(hn) + "," + dcell);
        list.push_back(row);
      }
      emitter.emit("anomalous primes", params,
                   json{{"limit", limit}, {"count", list.size()}, {"primes", list}}, &table);
    } else if (*cmd_squares) {
      json params{{"count", count}};
      json certs = json::array();
      json skipped = json::array();
      CsvTable table;
      table.header = "p,n,a,b,t,lifted,oracle_checked";
      for (const auto& entry : pell_sequence(count)) {
        if (entry.p > (1ULL << 31) || !is_prime(static_cast<uint64_t>(entry.p))) {
          skipped.push_back(json{{"k", entry.k}, {"p", uint128_to_string(entry.p)}});
          continue;
        }
        AnomalousCertificate cert = anomalous_square_certificate(static_cast<uint64_t>(entry.p));
        certs.push_back(certificate_record(cert));
        table.rows.push_back(std::to_string(cert.p) + "," + std::to_string(cert.n) + "," +
                             std::to_string(cert.a) + "," + std::to_string(cert.b) + "," +
                             std::to_string(cert.t) + "," + std::to_string(cert.lifted) + "," +
                             (cert.oracle_checked ? "true" : "false"));
      }
      emitter.emit("anomalous squares", params,
                   json{{"count", count}, {"certificates", certs}, {"skipped", skipped}}, &table);
    } else if (*cmd_pell) {
      json params{{"count", count}};
      json entries = json::array();
      CsvTable table;
      table.header = "k,p,n,s,u";
      for (const auto& e : pell_sequence(count)) {
        entries.push_back(json{{"k", e.k},
                               {"p", uint128_to_string(e.p)},
                               {"n", uint128_to_string(e.n)},
                               {"s", uint128_to_string(e.s)},
                               {"u", uint128_to_string(e.u)}});
        table.rows.push_back(std::to_string(e.k) + "," + uint128_to_string(e.p) + "," +
                             uint128_to_string(e.n) + "," + uint128_to_string(e.s) + "," +
                             uint128_to_string(e.u));
      }
      emitter.emit("pell", params, json{{"count", count}, {"entries", entries}}, &table);
    } else if (*cmd_check) {
      if (cmd_check->count("--p") || cmd_check->count("--q")) {
        if (!cmd_check->count("--p") || !cmd_check->count("--q"))
          return usage_error("korselt check: --p and --q must be given together");
        json params{{"p", p}, {"q", q}, {"c", c}, {"d", d}};
        bool korselt = korselt_two_prime_check(c, d, p, q);
        emitter.emit("korselt check", params,
                     json{{"p", p}, {"q", q}, {"n", p * q}, {"korselt", korselt}});
      } else {
        if (!cmd_check->count("--n"))
          return usage_error("korselt check: provide --n, or --p with --q");
        json params{{"n", n}, {"c", c}, {"d", d}};
        emitter.emit("korselt check", params, korselt_record(korselt_type1_check(c, d, n)));
      }
    } else if (*cmd_search) {
      json params{{"bound", bound}, {"c", c}, {"d", d}};
      std::cerr << "scanning semiprimes up to " << bound << "...\n";
      auto pairs = korselt_search(c, d, bound);
      json list = json::array();
      CsvTable table;
      table.header = "p,q,n";
      for (auto [pp, qq] : pairs) {
        list.push_back(json{{"p", pp}, {"q", qq}, {"n", pp * qq}});
        table.rows.push_back(std::to_string(pp) + "," + std::to_string(qq) + "," +
                             std::to_string(pp * qq));
      }
      emitter.emit("korselt search", params,
                   json{{"bound", bound}, {"count", pairs.size()}, {"pairs", list}}, &table);
    } else if (*cmd_classify) {
      json params{{"n", n}, {"c", c}, {"d", d}};
      json labels = json::array();
      for (SilvCondition cond : gen_silv_classify(c, d, n)) labels.push_back(to_string(cond));
      emitter.emit("classify", params, json{{"n", n}, {"conditions", labels}});
    } else if (*cmd_pseudo) {
      bool have_x = cmd_pseudo->count("--x") > 0;
      bool have_y = cmd_pseudo->count("--y") > 0;
      json params{{"n", n}, {"c", c}, {"d", d}, {"seed", seed}};
      CurveParams curve{n, c, d};
      CurvePoint pt;
      if (have_x || have_y) {
        if (!have_x || !have_y)
          return usage_error("pseudoprime: --x and --y must be given together");
        pt = CurvePoint::affine(px % n, py % n);
        if (!is_on_curve(curve, pt))
          throw std::invalid_argument("pseudoprime: (x, y) is not on the curve mod n");
      } else {
        Rng rng(seed);
        pt = sample_point(curve, rng);
      }
      PseudoprimeResult res = elliptic_pseudoprime_check(curve, pt);
      emitter.emit("pseudoprime", params,
                   json{{"n", n},
                        {"point", json{{"x", pt.x}, {"y", pt.y}}},
                        {"scalar", res.scalar},
                        {"is_pseudoprime", res.is_pseudoprime},
                        {"factors_found", res.factors_found}});
    } else if (*cmd_odc) {
      Weighting w = parse_weighting(weighting_name);
      uint64_t exact_bound = exact_bound_from_env();
      json params{{"ns", ns_list},
                  {"trials", trials},
                  {"seed", seed},
                  {"weighting", weighting_name},
                  {"exact_bound", exact_bound}};
      OdcTable table;
      for (uint64_t N : ns_list) {
        std::cerr << "N=" << N << "...\n";
        OdcTable one = odc_table({N}, trials, seed, w, exact_bound);
        table.rows.push_back(one.rows[0]);
      }
      CsvTable csv;
      std::string full = odc_table_csv(table);
      size_t nl = full.find('\n');
      csv.header = full.substr(0, nl);
      for (size_t pos = nl + 1; pos < full.size();) {
        size_t next = full.find('\n', pos);
        csv.rows.push_back(full.substr(pos, next - pos));
        pos = next + 1;
      }
      emitter.emit("experiment odc", params, odc_record(table), &csv);
    } else if (*cmd_density) {
      json params{{"d", d}, {"bound", bound}};
      AnomalousDensity res = count_anomalous_primes(d, bound);
      emitter.emit("density", params,
                   json{{"d", d},
                        {"bound", bound},
                        {"count", res.count},
                        {"c_estimate", res.c_estimate},
                        {"primes", res.primes}});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
