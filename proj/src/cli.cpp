#include "diffusion_factor/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#ifndef DIFFUSION_FACTOR_VERSION
#define DIFFUSION_FACTOR_VERSION "0.0.0"
#endif

namespace diffusion_factor::cli {

using nlohmann::json;

std::string probability_string(double p) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

std::string rational_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

json ledger_json(const StepLedger& ledger) {
  return {{"matrix_applications", ledger.matrix_applications},
          {"measurements", ledger.measurements},
          {"diffusion_steps", ledger.diffusion_steps()},
          {"digital_ops", ledger.digital_ops}};
}

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json interval_json(const CandidateInterval& c) {
  return {{"lower", probability_string(c.lower)},
          {"upper", probability_string(c.upper)},
          {"error_bound", probability_string(c.error_bound)},
          {"first", c.first},
          {"last", c.last},
          {"size", c.size()}};
}

}  // namespace

json outcome_json(const FactorOutcome& o) {
  json trace = json::object();
  const FactorTrace& t = o.trace;
  if (t.witness) {
    trace["witness"] = {{"l", t.witness->l},
                        {"l_prime", t.witness->l_prime},
                        {"sign", static_cast<int>(t.witness->sign)},
                        {"q", t.witness->q}};
  } else {
    trace["witness"] = nullptr;
  }
  trace["s"] = optional_json(t.s);
  trace["x"] = optional_json(t.x);
  trace["b"] = optional_json(t.b);
  trace["r_b"] = optional_json(t.r_b);
  trace["k"] = optional_json(t.k);
  trace["r_a"] = optional_json(t.r_a);
  trace["decode_path"] =
      t.decode_path ? json(std::string(decode_path_name(*t.decode_path))) : json(nullptr);
  trace["order_iterations"] = optional_json(t.order_iterations);
  return {{"status", status_name(o.status)},
          {"divisor", o.found() ? json(o.divisor) : json(nullptr)},
          {"cofactor", o.found() ? json(o.cofactor) : json(nullptr)},
          {"path", path_name(o.path)},
          {"reason", o.found() ? json(nullptr) : json(reason_name(o.reason))},
          {"a", o.chosen_a},
          {"ledger", ledger_json(o.ledger)},
          {"trace", trace}};
}

json order_json(const OrderResult& r) {
  json early = nullptr;
  if (r.last_check) {
    const EarlyStopCheck& c = *r.last_check;
    json probs = json::array();
    for (double p : c.measurements) probs.push_back(probability_string(p));
    early = {{"iteration", c.iteration},
             {"measured", probs},
             {"bound_interval", interval_json(c.bound_interval)},
             {"bracket", interval_json(c.bracket)}};
  }
  return {{"order", r.order},
          {"decode_path", decode_path_name(r.decode_path)},
          {"iterations", r.iterations},
          {"candidates_tried", r.candidates_tried},
          {"probability_at_start", r.probability_at_start
                                       ? json(probability_string(*r.probability_at_start))
                                       : json(nullptr)},
          {"early_stop", early}};
}

namespace {

struct Common {
  bool json_out = false;
  bool timing = false;
  std::string mode = "full";
  u64 check_every = 25;
  u64 max_candidates = 8;
  std::string measure = "square-chain";
};

void add_order_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--mode", c.mode, "full: run the provable step bound; early: stop on a small candidate set")
      ->check(CLI::IsMember({"full", "early"}));
  cmd->add_option("--check-every", c.check_every, "early-stop check cadence")->check(CLI::PositiveNumber);
  cmd->add_option("--max-candidates", c.max_candidates, "early-stop candidate threshold")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--measure", c.measure, "vertices read at each early-stop check")
      ->check(CLI::IsMember({"start", "s-powers", "square-chain", "all"}));
}

void add_output_options(CLI::App* cmd, Common& c) {
  cmd->add_flag("--json", c.json_out, "emit a RunRecord JSON object");
  cmd->add_flag("--timing", c.timing, "measure wall_time_ms (otherwise reported as 0)");
}

OrderFindConfig make_config(const Common& c) {
  OrderFindConfig config;
  config.mode = c.mode == "early" ? OrderMode::EarlyStop : OrderMode::FullBound;
  config.check_every = c.check_every;
  config.max_candidates = c.max_candidates;
  if (c.measure == "start") config.measure_set = MeasureSet::StartOnly;
  if (c.measure == "s-powers") config.measure_set = MeasureSet::SPowers;
  if (c.measure == "square-chain") config.measure_set = MeasureSet::SquareChain;
  if (c.measure == "all") config.measure_set = MeasureSet::All;
  return config;
}

json config_json(const Common& c) {
  return {{"mode", c.mode},
          {"check_every", c.check_every},
          {"max_candidates", c.max_candidates},
          {"measure", c.measure}};
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    if (!enabled_) return 0.0;
    const auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

json run_record(std::string command, json inputs, json outcome, json ledger, double wall_ms,
                std::optional<u64> seed) {
  return {{"command", std::move(command)},
          {"inputs", std::move(inputs)},
          {"outcome", std::move(outcome)},
          {"ledger", std::move(ledger)},
          {"wall_time_ms", wall_ms},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"artifact_version", DIFFUSION_FACTOR_VERSION}};
}

unsigned thread_cap() {
  if (const char* env = std::getenv("DIFFUSION_FACTOR_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<unsigned>(v);
  }
  return 0;
}

void print_ledger(std::ostream& out, const StepLedger& l) {
  out << "diffusion steps: " << l.diffusion_steps() << " (" << l.matrix_applications
      << " W-applications + " << l.measurements << " measurement(s)), digital ops: "
      << l.digital_ops << '\n';
}

// ------------------------------------------------------------------ factor

int cmd_factor(u64 n, std::optional<u64> a, std::optional<u64> seed, u64 attempts,
               const Common& c, std::ostream& out) {
  const Stopwatch watch(c.timing);
  const OrderFindConfig config = make_config(c);
  json inputs = {{"N", n},
                 {"a", a ? json(*a) : json(nullptr)},
                 {"attempts", a ? u64{1} : attempts},
                 {"order", config_json(c)}};

  std::vector<FactorOutcome> outcomes;
  json outcome;
  std::optional<u64> used_seed;
  if (a) {
    outcomes.push_back(factor_once(n, *a, config));
    outcome = outcome_json(outcomes.back());
    outcome["attempts_run"] = 1;
    outcome["rng_algorithm"] = nullptr;
    outcome["empirical_failure_rate"] = outcomes.back().found() ? "0/1" : "1/1";
  } else {
    used_seed = seed.value_or(1);
    TrialReport report = factor_with_retries(n, attempts, *used_seed, config);
    outcomes = std::move(report.outcomes);
    if (!outcomes.empty()) {
      outcome = outcome_json(outcomes.back());
    } else {
      outcome = {{"status", "NoAnswer"}, {"divisor", nullptr}, {"cofactor", nullptr},
                 {"path", nullptr},      {"reason", nullptr},  {"a", nullptr},
                 {"ledger", ledger_json({})}, {"trace", nullptr}};
    }
    outcome["attempts_run"] = report.attempts;
    outcome["rng_algorithm"] = report.rng_algorithm;
    outcome["empirical_failure_rate"] = rational_string(report.empirical_failure_rate);
  }
  json runs = json::array();
  StepLedger total;
  for (const auto& o : outcomes) {
    total += o.ledger;
    runs.push_back({{"a", o.chosen_a},
                    {"status", status_name(o.status)},
                    {"path", path_name(o.path)},
                    {"reason", o.found() ? json(nullptr) : json(reason_name(o.reason))}});
  }
  outcome["runs"] = runs;
  const bool ok = !outcomes.empty() && outcomes.back().found();

  if (c.json_out) {
    out << run_record("factor", inputs, outcome, ledger_json(total), watch.elapsed_ms(), used_seed)
               .dump()
        << '\n';
  } else if (ok) {
    const FactorOutcome& o = outcomes.back();
    out << n << " = " << o.divisor << " x " << o.cofactor << "  (a = " << o.chosen_a << ", "
        << path_name(o.path) << ", attempts " << outcomes.size() << ")\n";
    if (o.trace.witness) {
      out << "repetition: l = " << o.trace.witness->l << ", l' = " << o.trace.witness->l_prime
          << ", q = " << o.trace.witness->q << ", s = " << *o.trace.s << ", x = " << *o.trace.x
          << '\n';
    }
    if (o.trace.r_b) {
      out << "order: b = " << *o.trace.b << ", r_b = " << *o.trace.r_b << ", k = " << *o.trace.k
          << ", r_a = " << *o.trace.r_a << '\n';
    }
    print_ledger(out, total);
  } else {
    out << "no divisor found after " << outcomes.size() << " attempt(s)";
    if (!outcomes.empty()) out << " (last: " << reason_name(outcomes.back().reason) << ")";
    out << '\n';
    print_ledger(out, total);
  }
  return ok ? kExitOk : kExitNoAnswer;
}

// ------------------------------------------------------------------- order

int cmd_order(u64 n, u64 b, std::optional<u64> steps, const std::string& emit_probs,
              bool no_shortcut, const Common& c, std::ostream& out) {
  const Stopwatch watch(c.timing);
  OrderFindConfig config = make_config(c);
  config.steps_override = steps;
  config.repetition_shortcut = !no_shortcut && emit_probs.empty();
  json inputs = {{"N", n},
                 {"b", b},
                 {"steps", steps ? json(*steps) : json(nullptr)},
                 {"repetition_shortcut", config.repetition_shortcut},
                 {"order", config_json(c)}};

  const OrderResult result = find_order(Residue(b, n), config);
  if (!emit_probs.empty() && result.final_state) {
    std::ofstream csv(emit_probs);
    if (!csv) throw Error(Errc::PreconditionViolated, "cannot open " + emit_probs);
    write_probability_csv(csv, *result.final_state);
  }
  if (c.json_out) {
    out << run_record("order", inputs, order_json(result), ledger_json(result.ledger),
                      watch.elapsed_ms(), std::nullopt)
               .dump()
        << '\n';
  } else {
    out << "ord_" << n << "(" << b << ") = " << result.order << "  ("
        << decode_path_name(result.decode_path) << ", " << result.iterations << " iterations)\n";
    if (result.last_check && result.decode_path == DecodePath::EarlyStopDecode) {
      out << "early stop at n = " << result.last_check->iteration << " with "
          << result.last_check->measurements.size() << " measurements; candidates "
          << result.last_check->bracket.first << ".." << result.last_check->bracket.last << '\n';
    }
    print_ledger(out, result.ledger);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- spectrum

constexpr u64 kSpectrumGuard = 4096;

int cmd_spectrum(u64 r, unsigned M, bool verify, const Common& c, std::ostream& out) {
  const Stopwatch watch(c.timing);
  if (r % 2 == 0) throw Error(Errc::PreconditionViolated, "r must be odd");
  if (r > kSpectrumGuard) {
    throw Error(Errc::TooLarge, "r above the spectrum guard " + std::to_string(kSpectrumGuard));
  }
  const SpectralData s = spectral_data(r, M);
  std::optional<KorobovCheck> check;
  if (verify) check = verify_korobov_bound(r, M);

  json outcome = {{"r", r},
                  {"M", M},
                  {"lambda_star", s.lambda_star},
                  {"lambda_star_bound", 1.0 - 1.0 / (2.0 * (M + 1))},
                  {"lambda", s.lambda},
                  {"eta", s.eta}};
  outcome["korobov"] = check ? json{{"max_ratio", check->max_ratio},
                                    {"threshold", check->threshold},
                                    {"holds", check->holds}}
                             : json(nullptr);
  const bool ok = !check || check->holds;
  if (c.json_out) {
    out << run_record("spectrum", {{"r", r}, {"M", M}, {"verify_bound", verify}}, outcome,
                      ledger_json({}), watch.elapsed_ms(), std::nullopt)
               .dump()
        << '\n';
  } else {
    out << "r = " << r << ", M = " << M << ", lambda* = " << probability_string(s.lambda_star)
        << " (bound " << probability_string(1.0 - 1.0 / (2.0 * (M + 1))) << ")\n";
    if (check) {
      out << "max |eta_k| / 2(M+1) = " << probability_string(check->max_ratio) << " vs "
          << probability_string(check->threshold) << ": " << (check->holds ? "holds" : "FAILS")
          << '\n';
    }
  }
  return ok ? kExitOk : kExitNoAnswer;
}

// ------------------------------------------------------------ success-rate

int cmd_success_rate(u64 n, const Common& c, std::ostream& out) {
  const Stopwatch watch(c.timing);
  const OrderFindConfig config = make_config(c);
  const SuccessRate rate = exhaustive_success_rate(n, config, thread_cap());
  json histogram = json::object();
  for (const auto& [key, count] : rate.histogram) histogram[key] = count;
  json outcome = {{"rate_over_units", rational_string(rate.rate_over_units)},
                  {"rate_over_all", rational_string(rate.rate_over_all)},
                  {"bound", rational_string(rate.bound)},
                  {"bound_holds", rate.rate_over_units >= rate.bound},
                  {"distinct_primes", rate.distinct_primes},
                  {"units", rate.units},
                  {"found_units", rate.found_units},
                  {"found_all", rate.found_all},
                  {"histogram", histogram}};
  if (c.json_out) {
    out << run_record("success-rate", {{"N", n}, {"order", config_json(c)}}, outcome,
                      ledger_json({}), watch.elapsed_ms(), std::nullopt)
               .dump()
        << '\n';
  } else {
    out << "N = " << n << " (m = " << rate.distinct_primes << ")\n"
        << "success over units: " << rational_string(rate.rate_over_units) << " = "
        << rate.rate_over_units.convert_to<double>() << '\n'
        << "success over all a: " << rational_string(rate.rate_over_all) << " = "
        << rate.rate_over_all.convert_to<double>() << '\n'
        << "p(m) lower bound:   " << rational_string(rate.bound) << '\n';
    for (const auto& [key, count] : rate.histogram) out << "  " << key << ": " << count << '\n';
  }
  return kExitOk;
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::DecodeFailure:
    case Errc::EngineError:
    case Errc::WitnessInvalid:
    case Errc::LiftFailure:
      return kExitNoAnswer;
    default:
      return kExitUsage;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integer factorization by simulated heat diffusion on Cayley graphs",
               "diffusion-factor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DIFFUSION_FACTOR_VERSION);
  Common common;

  u64 n = 0;
  std::optional<u64> a, seed, steps;
  u64 attempts = 16;
  auto* factor = app.add_subcommand("factor", "find a nontrivial divisor of N");
  factor->add_option("N", n, "odd composite, not a prime power")->required();
  factor->add_option("--a", a, "fix the base instead of drawing it at random");
  factor->add_option("--seed", seed, "PRNG seed (default 1)");
  factor->add_option("--attempts", attempts, "maximum number of random bases")
      ->check(CLI::NonNegativeNumber);
  add_order_options(factor, common);
  add_output_options(factor, common);

  u64 b = 0;
  std::string emit_probs;
  bool no_shortcut = false;
  auto* order = app.add_subcommand("order", "multiplicative order of b mod N by diffusion");
  order->add_option("N", n, "modulus")->required();
  order->add_option("b", b, "unit of odd order")->required();
  order->add_option("--steps", steps, "override the number of walk iterations");
  order->add_option("--emit-probs", emit_probs,
                    "write the final probability vector as CSV (always walks)");
  order->add_flag("--no-shortcut", no_shortcut, "skip the power-table repetition check");
  add_order_options(order, common);
  add_output_options(order, common);

  u64 r = 0;
  unsigned M = 0;
  bool verify = false;
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the half-lazy walk on X_{r,S}");
  spectrum->add_option("r", r, "odd group order")->required();
  spectrum->add_option("M", M, "exponent bound")->required()->check(CLI::PositiveNumber);
  spectrum->add_flag("--verify-bound", verify, "check max|eta_k|/2(M+1) < 1 - 1/(M+1)");
  add_output_options(spectrum, common);

  auto* success = app.add_subcommand("success-rate", "run every a in 1..N and tally outcomes");
  success->add_option("N", n, "odd composite, not a prime power")->required();
  add_order_options(success, common);
  add_output_options(success, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << DIFFUSION_FACTOR_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*factor) return cmd_factor(n, a, seed, attempts, common, out);
    if (*order) return cmd_order(n, b, steps, emit_probs, no_shortcut, common, out);
    if (*spectrum) return cmd_spectrum(r, M, verify, common, out);
    if (*success) return cmd_success_rate(n, common, out);
  } catch (const Error& e) {
    if (e.code() == Errc::ScreenRejected) {
      err << e.what() << '\n';
    } else {
      err << "error: " << e.what() << '\n';
    }
    return exit_code_for(e.code());
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace diffusion_factor::cli
