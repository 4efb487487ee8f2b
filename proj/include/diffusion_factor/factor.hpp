#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffusion_factor/orderfind.hpp"

namespace diffusion_factor {

enum class FactorStatus { Found, NoAnswer };

enum class FactorPath { Step1Gcd, Step3Repetition, Step5Order };

enum class NoAnswerReason {
  None,
  /// s = 0 in step 3: a^q = 1, no square root of unity to split on.
  SZero,
  /// x^2 = 1 but x = +-1, so both gcds are trivial.
  TrivialGcd,
  /// S had no repetition and ord(a) is odd.
  OrderOddAtStep5,
  /// a = N: gcd(a, N) = N and a is not a unit.
  DegenerateChoice,
};

std::string_view status_name(FactorStatus s) noexcept;
std::string_view path_name(FactorPath p) noexcept;
std::string_view reason_name(NoAnswerReason r) noexcept;

/// Intermediate values of one run, for transcripts and golden tests.
struct FactorTrace {
  std::optional<RepetitionWitness> witness;
  std::optional<unsigned> s;
  std::optional<u64> x;
  std::optional<u64> b;
  std::optional<u64> r_b;
  std::optional<unsigned> k;
  std::optional<u64> r_a;
  std::optional<DecodePath> decode_path;
  std::optional<u64> order_iterations;
};

struct FactorOutcome {
  FactorStatus status = FactorStatus::NoAnswer;
  u64 divisor = 0;
  u64 cofactor = 0;
  NoAnswerReason reason = NoAnswerReason::None;
  FactorPath path = FactorPath::Step1Gcd;
  StepLedger ledger;
  u64 modulus = 0;
  u64 chosen_a = 0;
  FactorTrace trace;

  bool found() const noexcept { return status == FactorStatus::Found; }
};

struct SquareRootSplit {
  u64 x;
  u64 gcd_minus;  // gcd(x - 1, N)
  u64 gcd_plus;   // gcd(x + 1, N)
  std::optional<u64> divisor;
};

inline constexpr std::string_view kRngAlgorithm = "mt19937_64/rejection";

struct TrialReport {
  u64 modulus = 0;
  u64 seed = 0;
  std::string rng_algorithm{kRngAlgorithm};
  u64 attempts = 0;
  std::vector<FactorOutcome> outcomes;
  std::optional<u64> success;
  Rational empirical_failure_rate = 0;
};

struct SuccessRate {
  u64 modulus = 0;
  unsigned distinct_primes = 0;
  u64 units = 0;
  u64 found_units = 0;
  u64 found_all = 0;
  Rational rate_over_units = 0;
  Rational rate_over_all = 0;
  Rational bound = 0;  // p(m)
  /// "Found/step3", "NoAnswer/step5/OrderOddAtStep5", ...
  std::map<std::string, u64> histogram;
};

/// A run of higher repetitions: a^k = a^l with k < l.
struct HigherRepetition {
  u64 k;
  u64 l;
};

/// Least s <= l' with a^{2^s q} = 1. Throws WitnessInvalid.
unsigned compute_s(const Residue& a, u64 q, unsigned l_prime);

/// x = a^{2^{s-1} q}; reports the first nontrivial of gcd(x-1, N), gcd(x+1, N).
SquareRootSplit square_root_factor(const Residue& a, unsigned s, u64 q);

/// (k, 2^k r_b), k least with a^{2^k r_b} = 1. Throws LiftFailure if k > M.
std::pair<unsigned, u64> lift_order(const Residue& a, u64 r_b, unsigned M);

/// One pass of the five-step algorithm for a in [1, N]. Throws ScreenRejected
/// unless N is odd, composite and not a prime power.
FactorOutcome factor_once(u64 n, u64 a, const OrderFindConfig& config = {});

/// Draws a uniformly from {1..N} until a divisor is found or `attempts` runs.
TrialReport factor_with_retries(u64 n, u64 attempts, u64 seed,
                                const OrderFindConfig& config = {});

inline constexpr u64 kExhaustiveLimit = 100'000;

/// factor_once for every a in {1..N}. `threads` = 0 uses the hardware count.
SuccessRate exhaustive_success_rate(u64 n, const OrderFindConfig& config = {},
                                    unsigned threads = 0, u64 limit = kExhaustiveLimit);

/// Least-max (k, l) among exponents that are sums of at most `max_weight`
/// signed powers 2^t, t = 0..M, with a^k = a^l.
std::optional<HigherRepetition> higher_repetition_scan(const Residue& a, unsigned max_weight = 3);

/// Signed binary weight of n (non-adjacent form), the fewest terms +-2^t
/// summing to n.
unsigned signed_binary_weight(u64 n) noexcept;

}  // namespace diffusion_factor
