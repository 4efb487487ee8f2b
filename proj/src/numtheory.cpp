#include "diffusion_factor/numtheory.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

namespace diffusion_factor {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::NotAUnit: return "NotAUnit";
    case Errc::BadFactorization: return "BadFactorization";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::NonpositiveProbability: return "NonpositiveProbability";
    case Errc::EmptyMeasurements: return "EmptyMeasurements";
    case Errc::OrderNotOdd: return "OrderNotOdd";
    case Errc::DecodeFailure: return "DecodeFailure";
    case Errc::WitnessInvalid: return "WitnessInvalid";
    case Errc::LiftFailure: return "LiftFailure";
    case Errc::ScreenRejected: return "ScreenRejected";
    case Errc::TooLarge: return "TooLarge";
    case Errc::EngineError: return "EngineError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- Residue

Residue::Residue(u64 value, u64 modulus) : value_(0), modulus_(modulus) {
  if (modulus < 2 || modulus > kArithmeticLimit) {
    throw Error(Errc::OutOfRange, "modulus " + std::to_string(modulus) + " outside [2, 2^62]");
  }
  value_ = value % modulus;
}

Residue Residue::operator*(const Residue& other) const {
  if (other.modulus_ != modulus_) {
    throw Error(Errc::PreconditionViolated, "mixed moduli");
  }
  return Residue(mul_mod(value_, other.value_, modulus_), modulus_);
}

// --------------------------------------------------------------- Exponent

Exponent::Exponent(u64 value) {
  if (value != 0) limbs_.push_back(value);
}

Exponent Exponent::from_limbs(std::vector<u64> limbs) {
  Exponent e;
  e.limbs_ = std::move(limbs);
  e.trim();
  return e;
}

Exponent Exponent::pow2_times(unsigned shift, u64 factor) {
  return Exponent(factor).shifted_left(shift);
}

Exponent Exponent::shifted_left(unsigned bits) const {
  if (is_zero()) return {};
  const unsigned words = bits / 64;
  const unsigned rem = bits % 64;
  std::vector<u64> out(limbs_.size() + words + 1, 0);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    out[i + words] |= limbs_[i] << rem;
    if (rem != 0) out[i + words + 1] |= limbs_[i] >> (64 - rem);
  }
  return from_limbs(std::move(out));
}

unsigned Exponent::bit_width() const noexcept {
  if (is_zero()) return 0;
  return static_cast<unsigned>(64 * (limbs_.size() - 1)) +
         static_cast<unsigned>(std::bit_width(limbs_.back()));
}

bool Exponent::bit(unsigned index) const noexcept {
  const std::size_t word = index / 64;
  if (word >= limbs_.size()) return false;
  return (limbs_[word] >> (index % 64)) & 1U;
}

unsigned Exponent::popcount() const noexcept {
  unsigned total = 0;
  for (u64 limb : limbs_) total += static_cast<unsigned>(std::popcount(limb));
  return total;
}

std::optional<u64> Exponent::to_u64() const noexcept {
  if (limbs_.size() > 1) return std::nullopt;
  return limbs_.empty() ? 0 : limbs_[0];
}

std::string Exponent::to_string() const {
  boost::multiprecision::cpp_int value = 0;
  for (auto it = limbs_.rbegin(); it != limbs_.rend(); ++it) {
    value <<= 64;
    value += *it;
  }
  return value.str();
}

void Exponent::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

// ------------------------------------------------------------- arithmetic

u64 gcd(u64 a, u64 b) noexcept {
  while (b != 0) {
    const u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u64 euclid_iterations(u64 a, u64 b) noexcept {
  u64 steps = 0;
  while (b != 0) {
    const u64 t = a % b;
    a = b;
    b = t;
    ++steps;
  }
  return steps;
}

u64 mul_mod(u64 a, u64 b, u64 m) noexcept {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

Residue inverse(const Residue& a) {
  // extended Euclid on signed 128-bit to avoid overflow at the 2^62 limit
  __extension__ typedef __int128 i128;
  i128 old_r = a.value(), r = a.modulus();
  i128 old_s = 1, s = 0;
  while (r != 0) {
    const i128 q = old_r / r;
    old_r -= q * r;
    std::swap(old_r, r);
    old_s -= q * s;
    std::swap(old_s, s);
  }
  if (old_r != 1) {
    throw Error(Errc::NotAUnit,
                std::to_string(a.value()) + " is not a unit mod " + std::to_string(a.modulus()));
  }
  const i128 m = a.modulus();
  i128 inv = old_s % m;
  if (inv < 0) inv += m;
  return Residue(static_cast<u64>(inv), a.modulus());
}

Residue mod_pow(const Residue& base, const Exponent& exponent) {
  Residue result = Residue::one(base.modulus());
  for (unsigned i = exponent.bit_width(); i-- > 0;) {
    result = result.squared();
    if (exponent.bit(i)) result = result * base;
  }
  return result;
}

Residue mod_pow(const Residue& base, u64 exponent) {
  u64 result = 1 % base.modulus();
  u64 acc = base.value();
  const u64 m = base.modulus();
  while (exponent > 0) {
    if (exponent & 1U) result = mul_mod(result, acc, m);
    acc = mul_mod(acc, acc, m);
    exponent >>= 1;
  }
  return Residue(result, m);
}

u64 mod_pow_cost(const Exponent& exponent) noexcept {
  return exponent.bit_width() + exponent.popcount();
}

unsigned exponent_bound(u64 n) noexcept { return static_cast<unsigned>(std::bit_width(n)); }

namespace {

void require_unit(const Residue& a) {
  if (gcd(a.value(), a.modulus()) != 1) {
    throw Error(Errc::NotAUnit,
                std::to_string(a.value()) + " is not a unit mod " + std::to_string(a.modulus()));
  }
}

}  // namespace

u64 order_bruteforce(const Residue& a) {
  require_unit(a);
  Residue x = a;
  u64 r = 1;
  while (!x.is_one()) {
    x = x * a;
    ++r;
  }
  return r;
}

u64 order_from_multiple(const Residue& a, u64 multiple) {
  if (multiple == 0) throw Error(Errc::PreconditionViolated, "multiple must be positive");
  if (!mod_pow(a, multiple).is_one()) {
    throw Error(Errc::PreconditionViolated, "not a multiple of the order");
  }
  u64 order = multiple;
  for (const auto& pp : factorize(multiple)) {
    for (unsigned i = 0; i < pp.exponent; ++i) {
      if (mod_pow(a, order / pp.prime).is_one()) {
        order /= pp.prime;
      } else {
        break;
      }
    }
  }
  return order;
}

TwoAdicSplit two_adic_split(u64 n) {
  if (n == 0) throw Error(Errc::PreconditionViolated, "two_adic_split(0)");
  const auto power = static_cast<unsigned>(std::countr_zero(n));
  return {power, n >> power};
}

u64 cyclic_power_order(u64 n, u64 d) {
  if (n == 0 || d == 0 || d > n) {
    throw Error(Errc::PreconditionViolated, "cyclic_power_order needs 1 <= d <= n");
  }
  return n / gcd(n, d);
}

// ---------------------------------------------------------------- screens

bool is_prime(u64 n) noexcept {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  // This witness set is sufficient for every n < 2^64.
  const auto s = static_cast<unsigned>(std::countr_zero(n - 1));
  const u64 d = (n - 1) >> s;
  auto pow = [n](u64 b, u64 e) {
    u64 r = 1;
    while (e > 0) {
      if (e & 1U) r = mul_mod(r, b, n);
      b = mul_mod(b, b, n);
      e >>= 1;
    }
    return r;
  };
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    u64 x = pow(a, d);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 integer_root(u64 n, unsigned k) noexcept {
  if (k == 0) return 0;
  if (k == 1 || n < 2) return n;
  // power with saturation at n + 1
  auto pow_capped = [n, k](u64 base) {
    u128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
      acc *= base;
      if (acc > n) return static_cast<u128>(n) + 1;
    }
    return acc;
  };
  u64 lo = 1, hi = u64{1} << ((std::bit_width(n) + k - 1) / k);
  while (lo < hi) {
    const u64 mid = lo + (hi - lo + 1) / 2;
    if (pow_capped(mid) <= n) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

std::vector<PrimePower> factorize(u64 n) {
  std::vector<PrimePower> out;
  if (n < 2) return out;
  auto take = [&](u64 p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) out.push_back({p, e});
  };
  take(2);
  for (u64 p = 3; p <= n / p; p += 2) take(p);
  if (n > 1) out.push_back({n, 1});
  return out;
}

std::string ScreenResult::describe() const {
  switch (kind) {
    case ScreenKind::CompositeNonPrimePower: return "composite";
    case ScreenKind::Prime: return "prime";
    case ScreenKind::PrimePower:
      return "prime power: " + std::to_string(base) + "^" + std::to_string(exponent);
    case ScreenKind::Even: return "even";
  }
  return "unknown";
}

ScreenResult screen_input(u64 n, u64 max_modulus) {
  if (n < 2) throw Error(Errc::PreconditionViolated, "N must be >= 2");
  if (n > max_modulus || n > kArithmeticLimit) {
    throw Error(Errc::OutOfRange,
                std::to_string(n) + " exceeds the modulus cap " + std::to_string(max_modulus));
  }
  if (n == 2) return {ScreenKind::Prime, 2, 1};
  if (n % 2 == 0) return {ScreenKind::Even, 2, 0};
  if (is_prime(n)) return {ScreenKind::Prime, n, 1};
  for (unsigned k = exponent_bound(n); k >= 2; --k) {
    const u64 root = integer_root(n, k);
    u128 check = 1;
    for (unsigned i = 0; i < k; ++i) check *= root;
    if (check == n && is_prime(root)) return {ScreenKind::PrimePower, root, k};
  }
  return {ScreenKind::CompositeNonPrimePower, 0, 0};
}

// -------------------------------------------------------------------- CRT

u64 CrtProfile::reconstruct() const {
  // Garner-free CRT: sum of c_i * M_i * (M_i^{-1} mod m_i)
  u128 acc = 0;
  for (const auto& c : components) {
    const u64 residue = mod_pow(Residue(c.generator, c.modulus), c.log).value();
    const u64 rest = modulus / c.modulus;
    const u64 rest_inv = inverse(Residue(rest % c.modulus, c.modulus)).value();
    const u64 coeff = mul_mod(residue, rest_inv, c.modulus);
    acc = (acc + static_cast<u128>(coeff) * rest) % modulus;
  }
  return static_cast<u64>(acc);
}

CrtProfile crt_profile(const Residue& a, const std::vector<PrimePower>& prime_powers) {
  require_unit(a);
  CrtProfile profile{a.value(), a.modulus(), {}};
  u128 product = 1;
  for (const auto& pp : prime_powers) {
    if (pp.prime % 2 == 0 || !is_prime(pp.prime) || pp.exponent == 0) {
      throw Error(Errc::BadFactorization, "components must be odd primes with e >= 1");
    }
    for (const auto& seen : profile.components) {
      if (seen.prime == pp.prime) throw Error(Errc::BadFactorization, "repeated prime");
    }
    u64 modulus = 1;
    for (unsigned i = 0; i < pp.exponent; ++i) modulus *= pp.prime;
    product *= modulus;
    if (product > a.modulus()) break;

    const u64 group_order = modulus / pp.prime * (pp.prime - 1);
    u64 generator = 0;
    for (u64 g = 2; g < modulus; ++g) {
      if (gcd(g, modulus) != 1) continue;
      if (order_bruteforce(Residue(g, modulus)) == group_order) {
        generator = g;
        break;
      }
    }
    const Residue target(a.value(), modulus);
    const Residue gen(generator, modulus);
    // logs live in [1, group_order]; the identity maps to group_order
    Residue power = gen;
    u64 log = 1;
    while (!(power == target)) {
      power = power * gen;
      ++log;
    }
    profile.components.push_back({pp.prime, pp.exponent, modulus, group_order, generator, log});
  }
  if (product != a.modulus()) {
    throw Error(Errc::BadFactorization, "prime powers do not multiply to N");
  }
  return profile;
}

// ----------------------------------------------------------- probability

Rational p_success(unsigned m) {
  if (m < 2) throw Error(Errc::PreconditionViolated, "p(m) needs m >= 2");
  const boost::multiprecision::cpp_int denom = boost::multiprecision::cpp_int(1) << m;
  return Rational(1) - Rational(m + 1) / Rational(denom);
}

Rational failure_bound(unsigned m, unsigned trials) {
  const Rational per_trial = Rational(1) - p_success(m);
  Rational out = 1;
  for (unsigned i = 0; i < trials; ++i) out *= per_trial;
  return out;
}

}  // namespace diffusion_factor
