#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "diffusion_factor/error.hpp"
#include "diffusion_factor/factor.hpp"

using namespace diffusion_factor;

namespace {

u64 naive_order(u64 a, u64 n) {
  u64 x = a % n;
  u64 r = 1;
  while (x != 1) {
    x = x * a % n;
    ++r;
  }
  return r;
}

u64 naive_pow(u64 a, u64 e, u64 n) {
  u64 r = 1 % n;
  for (u64 i = 0; i < e; ++i) r = r * a % n;
  return r;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::EngineError;
}

OrderFindConfig early() {
  OrderFindConfig c;
  c.mode = OrderMode::EarlyStop;
  return c;
}

}  // namespace

TEST_CASE("N = 33, a = 5 splits at the repetition") {
  const FactorOutcome o = factor_once(33, 5);
  CHECK(o.found());
  CHECK(o.divisor == 11);
  CHECK(o.cofactor == 3);
  CHECK(o.path == FactorPath::Step3Repetition);
  REQUIRE(o.trace.witness);
  CHECK(o.trace.witness->q == 15);
  CHECK(o.trace.s == 1U);
  CHECK(o.trace.x == 23U);
  CHECK(o.ledger.diffusion_steps() == 0);
}

TEST_CASE("N = 1363, a = 991 needs the order of b = 944") {
  const FactorOutcome o = factor_once(1363, 991);
  CHECK(o.found());
  CHECK(o.divisor == 47);
  CHECK(o.path == FactorPath::Step5Order);
  CHECK(!o.trace.witness);
  CHECK(o.trace.b == 944U);
  CHECK(o.trace.r_b == 161U);
  CHECK(o.trace.k == 1U);
  CHECK(o.trace.r_a == 322U);
  CHECK(o.ledger.matrix_applications == 347);
  CHECK(o.ledger.measurements == 1);

  const FactorOutcome fast = factor_once(1363, 991, early());
  CHECK(fast.divisor == 47);
  CHECK(fast.ledger.diffusion_steps() == 36);
  CHECK(fast.trace.decode_path == DecodePath::EarlyStopDecode);
}

TEST_CASE("step 1 outcomes") {
  const FactorOutcome shared = factor_once(33, 6);
  CHECK(shared.found());
  CHECK(shared.divisor == 3);
  CHECK(shared.path == FactorPath::Step1Gcd);

  const FactorOutcome whole = factor_once(33, 33);
  CHECK(!whole.found());
  CHECK(whole.reason == NoAnswerReason::DegenerateChoice);
}

TEST_CASE("input checks") {
  CHECK(code_of([] { factor_once(49, 2); }) == Errc::ScreenRejected);
  CHECK(code_of([] { factor_once(47, 2); }) == Errc::ScreenRejected);
  CHECK(code_of([] { factor_once(34, 3); }) == Errc::ScreenRejected);
  CHECK(code_of([] { factor_once(33, 0); }) == Errc::PreconditionViolated);
  CHECK(code_of([] { factor_once(33, 34); }) == Errc::PreconditionViolated);
}

TEST_CASE("square-root and lifting helpers") {
  const Residue a(5, 33);
  CHECK(compute_s(a, 15, 1) == 1);
  CHECK(code_of([&] { compute_s(a, 7, 1); }) == Errc::WitnessInvalid);

  const SquareRootSplit split = square_root_factor(a, 1, 15);
  CHECK(split.x == 23);
  CHECK(split.gcd_minus == 11);
  CHECK(split.gcd_plus == 3);
  CHECK(split.divisor == 11U);
  CHECK(code_of([&] { square_root_factor(a, 0, 15); }) == Errc::PreconditionViolated);
  // 5^{10} = 1 mod 33, so "s = 2, q = 5" has x = 5^{10} = 1
  CHECK(code_of([&] { square_root_factor(a, 2, 5); }) == Errc::WitnessInvalid);

  CHECK(lift_order(Residue(991, 1363), 161, 11) == std::pair<unsigned, u64>{1, 322});
  CHECK(code_of([] { lift_order(Residue(991, 1363), 7, 11); }) == Errc::LiftFailure);
}

TEST_CASE("number-theory lemmas over the test moduli") {
  for (u64 n : {33ULL, 35ULL, 105ULL, 1363ULL}) {
    const unsigned M = exponent_bound(n);
    for (u64 a = 1; a < n; ++a) {
      if (std::gcd(a, n) != 1) continue;
      const u64 ra = naive_order(a, n);
      u64 b = a;
      for (unsigned t = 0; t < M; ++t) b = b * b % n;
      const u64 rb = naive_order(b, n);
      CHECK(rb % 2 == 1);
      CHECK(std::countr_zero(ra) < std::log2(static_cast<double>(n)));
      CHECK(lift_order(Residue(a, n), rb, M).second == ra);

      const FactorOutcome o = factor_once(n, a);
      if (o.trace.x) CHECK(*o.trace.x * *o.trace.x % n == 1);
      if (o.trace.r_a) CHECK(*o.trace.r_a == ra);
      if (o.found()) CHECK(o.divisor * o.cofactor == n);
    }
  }
}

TEST_CASE("random retries are reproducible") {
  const TrialReport one = factor_with_retries(1363, 16, 7);
  const TrialReport two = factor_with_retries(1363, 16, 7);
  REQUIRE(one.outcomes.size() == two.outcomes.size());
  for (std::size_t i = 0; i < one.outcomes.size(); ++i) {
    CHECK(one.outcomes[i].chosen_a == two.outcomes[i].chosen_a);
  }
  CHECK(one.success == two.success);
  CHECK(one.rng_algorithm == "mt19937_64/rejection");
  CHECK(one.attempts == one.outcomes.size());
  for (std::size_t i = 0; i + 1 < one.outcomes.size(); ++i) CHECK(!one.outcomes[i].found());
  if (one.success) {
    CHECK(1363 % *one.success == 0);
    CHECK(one.empirical_failure_rate == Rational(one.attempts - 1, one.attempts));
  }

  std::set<u64> seen;
  for (u64 seed = 0; seed < 200; ++seed) {
    for (const auto& o : factor_with_retries(35, 4, seed).outcomes) {
      CHECK(o.chosen_a >= 1);
      CHECK(o.chosen_a <= 35);
      seen.insert(o.chosen_a);
    }
  }
  CHECK(seen.size() > 20);
  CHECK(factor_with_retries(35, 0, 1).outcomes.empty());
}

TEST_CASE("exhaustive success rates") {
  const SuccessRate r33 = exhaustive_success_rate(33);
  CHECK(r33.distinct_primes == 2);
  CHECK(r33.units == 20);
  CHECK(r33.bound == Rational(1, 4));
  CHECK(r33.rate_over_units >= r33.bound);
  u64 total = 0;
  for (const auto& [key, count] : r33.histogram) total += count;
  CHECK(total == 33);
  CHECK(r33.histogram.at("NoAnswer/step1/DegenerateChoice") == 1);
  CHECK(r33.histogram.at("Found/step1") == 12);

  const SuccessRate serial = exhaustive_success_rate(105, {}, 1);
  const SuccessRate parallel = exhaustive_success_rate(105, {}, 4);
  CHECK(serial.histogram == parallel.histogram);
  CHECK(serial.rate_over_units == parallel.rate_over_units);
  CHECK(serial.bound == Rational(1, 2));

  CHECK(code_of([] { exhaustive_success_rate(1363, {}, 1, 1000); }) == Errc::TooLarge);
  CHECK(code_of([] { exhaustive_success_rate(49); }) == Errc::ScreenRejected);
}

TEST_CASE("signed binary weight") {
  std::function<unsigned(u64)> oracle = [&](u64 n) -> unsigned {
    if (n <= 1) return static_cast<unsigned>(n);
    if (n % 2 == 0) return oracle(n / 2);
    return 1 + std::min(oracle((n - 1) / 2), oracle((n + 1) / 2));
  };
  for (u64 n = 0; n < 3000; ++n) CHECK(signed_binary_weight(n) == oracle(n));
  CHECK(signed_binary_weight(511) == 2);
  CHECK(signed_binary_weight(1072) == 3);
}

TEST_CASE("higher repetitions") {
  // an element of order 561 = 3 * 11 * 17 modulo the prime 1123 = 2 * 561 + 1
  REQUIRE(is_prime(1123));
  u64 a = 0;
  for (u64 g = 2; g < 1123 && a == 0; ++g) {
    if (naive_order(g, 1123) == 561) a = g;
  }
  REQUIRE(a != 0);
  const unsigned M = exponent_bound(1123);

  // independent scan: exponents with at most three signed terms 2^t, t <= M
  std::set<long long> exps;
  std::vector<long long> terms{0};
  for (unsigned t = 0; t <= M; ++t) {
    terms.push_back(1LL << t);
    terms.push_back(-(1LL << t));
  }
  for (long long x : terms) {
    for (long long y : terms) {
      for (long long z : terms) {
        if (x + y + z > 0) exps.insert(x + y + z);
      }
    }
  }
  std::map<u64, long long> first;
  std::optional<std::pair<long long, long long>> expected;
  for (long long e : exps) {
    const auto [it, fresh] = first.emplace(naive_pow(a, static_cast<u64>(e), 1123), e);
    if (!fresh) {
      expected = std::pair{it->second, e};
      break;
    }
  }
  REQUIRE(expected);
  CHECK((expected->second - expected->first) % 561 == 0);

  const auto got = higher_repetition_scan(Residue(a, 1123), 3);
  REQUIRE(got);
  CHECK(static_cast<long long>(got->k) == expected->first);
  CHECK(static_cast<long long>(got->l) == expected->second);
  CHECK(got->k == 7);
  CHECK(got->l == 568);  // 512 + 64 - 8

  // the plain power table sees no repetition for this a
  CHECK(!find_repetition(build_power_table(Residue(a, 1123))));
  CHECK(code_of([] { higher_repetition_scan(Residue(3, 33)); }) == Errc::NotAUnit);
}
