#include "diffusion_factor/factor.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

namespace diffusion_factor {

std::string_view status_name(FactorStatus s) noexcept {
  return s == FactorStatus::Found ? "Found" : "NoAnswer";
}

std::string_view path_name(FactorPath p) noexcept {
  switch (p) {
    case FactorPath::Step1Gcd: return "step1";
    case FactorPath::Step3Repetition: return "step3";
    case FactorPath::Step5Order: return "step5";
  }
  return "unknown";
}

std::string_view reason_name(NoAnswerReason r) noexcept {
  switch (r) {
    case NoAnswerReason::None: return "None";
    case NoAnswerReason::SZero: return "SZero";
    case NoAnswerReason::TrivialGcd: return "TrivialGcd";
    case NoAnswerReason::OrderOddAtStep5: return "OrderOddAtStep5";
    case NoAnswerReason::DegenerateChoice: return "DegenerateChoice";
  }
  return "unknown";
}

unsigned compute_s(const Residue& a, u64 q, unsigned l_prime) {
  Residue y = mod_pow(a, q);
  for (unsigned s = 0; s <= l_prime; ++s) {
    if (y.is_one()) return s;
    y = y.squared();
  }
  throw Error(Errc::WitnessInvalid, "a^{2^l' q} != 1 for q = " + std::to_string(q));
}

SquareRootSplit square_root_factor(const Residue& a, unsigned s, u64 q) {
  if (s == 0) throw Error(Errc::PreconditionViolated, "square_root_factor needs s >= 1");
  Residue x = mod_pow(a, q);
  for (unsigned i = 1; i < s; ++i) x = x.squared();
  if (!x.squared().is_one()) throw Error(Errc::WitnessInvalid, "x^2 != 1");
  if (x.is_one()) throw Error(Errc::WitnessInvalid, "x = 1, s was not minimal");
  const u64 n = a.modulus();
  SquareRootSplit out{x.value(), gcd(x.value() - 1, n), gcd((x.value() + 1) % n, n), std::nullopt};
  for (u64 d : {out.gcd_minus, out.gcd_plus}) {
    if (d > 1 && d < n) {
      out.divisor = d;
      break;
    }
  }
  return out;
}

std::pair<unsigned, u64> lift_order(const Residue& a, u64 r_b, unsigned M) {
  Residue y = mod_pow(a, r_b);
  for (unsigned k = 0; k <= M; ++k) {
    if (y.is_one()) return {k, r_b << k};
    y = y.squared();
  }
  throw Error(Errc::LiftFailure, "a^{2^k r_b} != 1 for every k <= M");
}

namespace {

void require_factorable(u64 n) {
  const ScreenResult screen = screen_input(n);
  if (screen.kind != ScreenKind::CompositeNonPrimePower) {
    throw Error(Errc::ScreenRejected, screen.describe());
  }
}

void found(FactorOutcome& out, FactorPath path, u64 divisor) {
  out.status = FactorStatus::Found;
  out.path = path;
  out.divisor = divisor;
  out.cofactor = out.modulus / divisor;
  out.reason = NoAnswerReason::None;
}

void no_answer(FactorOutcome& out, FactorPath path, NoAnswerReason reason) {
  out.status = FactorStatus::NoAnswer;
  out.path = path;
  out.reason = reason;
}

FactorOutcome run_pipeline(u64 n, u64 a_value, const OrderFindConfig& config) {
  FactorOutcome out;
  out.modulus = n;
  out.chosen_a = a_value;
  StepLedger& ledger = out.ledger;

  // Step 1
  const u64 d = gcd(a_value, n);
  ledger.digital_ops += euclid_iterations(n, a_value % n);
  if (d > 1 && d < n) {
    found(out, FactorPath::Step1Gcd, d);
    return out;
  }
  if (d == n) {
    no_answer(out, FactorPath::Step1Gcd, NoAnswerReason::DegenerateChoice);
    return out;
  }
  const Residue a(a_value, n);

  // Step 2
  const PowerTable table = build_power_table(a);
  ledger.digital_ops += 2 * table.M + euclid_iterations(n, a_value);

  // Step 3
  if (const auto witness = find_repetition(table)) {
    out.trace.witness = witness;
    const unsigned s = compute_s(a, witness->q, witness->l_prime);
    ledger.digital_ops += mod_pow_cost(Exponent(witness->q)) + s;
    out.trace.s = s;
    if (s == 0) {
      no_answer(out, FactorPath::Step3Repetition, NoAnswerReason::SZero);
      return out;
    }
    const SquareRootSplit split = square_root_factor(a, s, witness->q);
    ledger.digital_ops += mod_pow_cost(Exponent(witness->q)) + s +
                          euclid_iterations(n, split.x - 1) +
                          euclid_iterations(n, (split.x + 1) % n);
    out.trace.x = split.x;
    if (split.divisor) {
      found(out, FactorPath::Step3Repetition, *split.divisor);
    } else {
      no_answer(out, FactorPath::Step3Repetition, NoAnswerReason::TrivialGcd);
    }
    return out;
  }

  // Step 4
  const Residue b = table.plus_powers[table.M];
  out.trace.b = b.value();
  const OrderResult order = find_order(b, config);
  ledger += order.ledger;
  out.trace.r_b = order.order;
  out.trace.decode_path = order.decode_path;
  out.trace.order_iterations = order.iterations;

  // Step 5
  const auto [k, r_a] = lift_order(a, order.order, table.M);
  ledger.digital_ops += mod_pow_cost(Exponent(order.order)) + k;
  out.trace.k = k;
  out.trace.r_a = r_a;
  if (r_a % 2 != 0) {
    no_answer(out, FactorPath::Step5Order, NoAnswerReason::OrderOddAtStep5);
    return out;
  }
  const SquareRootSplit split = square_root_factor(a, k, order.order);
  ledger.digital_ops += mod_pow_cost(Exponent(order.order)) + k +
                        euclid_iterations(n, split.x - 1) + euclid_iterations(n, (split.x + 1) % n);
  out.trace.x = split.x;
  if (split.divisor) {
    found(out, FactorPath::Step5Order, *split.divisor);
  } else {
    no_answer(out, FactorPath::Step5Order, NoAnswerReason::TrivialGcd);
  }
  return out;
}

u64 draw_uniform(std::mt19937_64& rng, u64 n) {
  // reject the low 2^64 mod n outputs so x % n is exactly uniform
  const u64 threshold = (0 - n) % n;
  u64 x = rng();
  while (x < threshold) x = rng();
  return x % n + 1;
}

std::string histogram_key(const FactorOutcome& o) {
  std::string key(status_name(o.status));
  key += '/';
  key += path_name(o.path);
  if (!o.found()) {
    key += '/';
    key += reason_name(o.reason);
  }
  return key;
}

}  // namespace

FactorOutcome factor_once(u64 n, u64 a, const OrderFindConfig& config) {
  require_factorable(n);
  if (a < 1 || a > n) throw Error(Errc::PreconditionViolated, "a must lie in [1, N]");
  return run_pipeline(n, a, config);
}

TrialReport factor_with_retries(u64 n, u64 attempts, u64 seed, const OrderFindConfig& config) {
  require_factorable(n);
  TrialReport report;
  report.modulus = n;
  report.seed = seed;
  std::mt19937_64 rng(seed);
  u64 failures = 0;
  for (u64 i = 0; i < attempts; ++i) {
    const u64 a = draw_uniform(rng, n);
    report.outcomes.push_back(run_pipeline(n, a, config));
    ++report.attempts;
    if (report.outcomes.back().found()) {
      report.success = report.outcomes.back().divisor;
      break;
    }
    ++failures;
  }
  if (report.attempts > 0) report.empirical_failure_rate = Rational(failures, report.attempts);
  return report;
}

SuccessRate exhaustive_success_rate(u64 n, const OrderFindConfig& config, unsigned threads,
                                    u64 limit) {
  if (n > limit) {
    throw Error(Errc::TooLarge, std::to_string(n) + " exceeds the enumeration limit " +
                                    std::to_string(limit));
  }
  require_factorable(n);

  std::vector<FactorOutcome> outcomes(n);
  std::atomic<u64> next{1};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const u64 a = next.fetch_add(1);
      if (a > n) return;
      try {
        outcomes[a - 1] = run_pipeline(n, a, config);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n + 1;
        return;
      }
    }
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<u64>(threads, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SuccessRate rate;
  rate.modulus = n;
  rate.distinct_primes = static_cast<unsigned>(factorize(n).size());
  for (u64 a = 1; a <= n; ++a) {
    const FactorOutcome& o = outcomes[a - 1];
    const bool unit = gcd(a, n) == 1;
    if (unit) ++rate.units;
    if (o.found()) {
      ++rate.found_all;
      if (unit) ++rate.found_units;
    }
    ++rate.histogram[histogram_key(o)];
  }
  rate.rate_over_units = Rational(rate.found_units, rate.units);
  rate.rate_over_all = Rational(rate.found_all, n);
  rate.bound = p_success(rate.distinct_primes);
  return rate;
}

std::optional<HigherRepetition> higher_repetition_scan(const Residue& a, unsigned max_weight) {
  if (gcd(a.value(), a.modulus()) != 1) throw Error(Errc::NotAUnit, "scan needs a unit");
  const unsigned M = exponent_bound(a.modulus());
  using i64 = long long;
  std::set<i64> level{0};
  std::set<i64> exponents;
  for (unsigned w = 1; w <= max_weight; ++w) {
    std::set<i64> grown;
    for (i64 e : level) {
      for (unsigned t = 0; t <= M; ++t) {
        grown.insert(e + (i64{1} << t));
        grown.insert(e - (i64{1} << t));
      }
    }
    for (i64 e : grown) {
      if (e > 0) exponents.insert(e);
    }
    level = std::move(grown);
  }
  std::unordered_map<u64, u64> first_seen;
  for (i64 e : exponents) {  // ascending, so the first hit minimizes max(k, l)
    const u64 value = mod_pow(a, static_cast<u64>(e)).value();
    const auto [it, inserted] = first_seen.emplace(value, static_cast<u64>(e));
    if (!inserted) return HigherRepetition{it->second, static_cast<u64>(e)};
  }
  return std::nullopt;
}

unsigned signed_binary_weight(u64 n) noexcept {
  u128 v = n;
  unsigned weight = 0;
  while (v != 0) {
    if (v & 1U) {
      ++weight;
      if ((v & 3U) == 3U) {
        v += 1;
      } else {
        v -= 1;
      }
    }
    v >>= 1;
  }
  return weight;
}

}  // namespace diffusion_factor
