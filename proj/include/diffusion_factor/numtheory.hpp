#pragma once

// Exact modular arithmetic on 64-bit residues, plus the brute-force and CRT
// oracles the rest of the library is tested against.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "diffusion_factor/error.hpp"

namespace diffusion_factor {

using u64 = std::uint64_t;
__extension__ typedef unsigned __int128 u128;
using Rational = boost::multiprecision::cpp_rational;

/// Largest modulus the arithmetic layer accepts (products use 128-bit
/// intermediates, x + 1 must not wrap).
inline constexpr u64 kArithmeticLimit = u64{1} << 62;

/// Default cap for the factorization pipeline and the screen.
inline constexpr u64 kDefaultModulusCap = u64{1} << 31;

/// An integer modulo N, 0 <= value < modulus, modulus >= 2.
class Residue {
 public:
  /// Reduces `value` modulo `modulus`. Throws OutOfRange for modulus < 2 or
  /// modulus > kArithmeticLimit.
  Residue(u64 value, u64 modulus);

  static Residue one(u64 modulus) { return Residue(1, modulus); }

  u64 value() const noexcept { return value_; }
  u64 modulus() const noexcept { return modulus_; }
  bool is_one() const noexcept { return value_ == 1; }

  Residue operator*(const Residue& other) const;
  Residue squared() const { return *this * *this; }

  friend bool operator==(const Residue&, const Residue&) = default;

 private:
  u64 value_;
  u64 modulus_;
};

/// Nonnegative integer of arbitrary length, little-endian 64-bit limbs.
/// Only what square-and-multiply needs: construction, shifts, bit access.
class Exponent {
 public:
  Exponent() = default;
  Exponent(u64 value);  // NOLINT(google-explicit-constructor)

  static Exponent from_limbs(std::vector<u64> limbs);
  /// 2^shift * odd
  static Exponent pow2_times(unsigned shift, u64 factor);

  Exponent shifted_left(unsigned bits) const;

  unsigned bit_width() const noexcept;
  bool bit(unsigned index) const noexcept;
  unsigned popcount() const noexcept;
  bool is_zero() const noexcept { return limbs_.empty(); }
  const std::vector<u64>& limbs() const noexcept { return limbs_; }
  std::optional<u64> to_u64() const noexcept;
  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;

 private:
  void trim();
  std::vector<u64> limbs_;
};

struct TwoAdicSplit {
  unsigned power = 0;
  u64 odd_part = 1;
};

enum class ScreenKind { CompositeNonPrimePower, Prime, PrimePower, Even };

struct ScreenResult {
  ScreenKind kind;
  u64 base = 0;       // prime p for PrimePower, N itself for Prime
  unsigned exponent = 0;

  std::string describe() const;
};

struct PrimePower {
  u64 prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

struct CrtComponent {
  u64 prime;
  unsigned exponent;
  u64 modulus;      // prime^exponent
  u64 group_order;  // prime^(exponent-1) * (prime-1)
  u64 generator;    // least primitive root mod `modulus`
  u64 log;          // discrete log of a, in [1, group_order]
};

/// Image of a unit under Z_N^* -> prod Z_{p_i^e_i}^*, as exponents of fixed
/// primitive roots.
struct CrtProfile {
  u64 value;
  u64 modulus;
  std::vector<CrtComponent> components;

  /// Reassembles a from (u_i, d_i) by CRT.
  u64 reconstruct() const;
};

u64 gcd(u64 a, u64 b) noexcept;
/// Number of division steps the Euclidean algorithm takes on (a, b).
u64 euclid_iterations(u64 a, u64 b) noexcept;

u64 mul_mod(u64 a, u64 b, u64 m) noexcept;

/// Inverse of a unit. Throws NotAUnit.
Residue inverse(const Residue& a);

Residue mod_pow(const Residue& base, const Exponent& exponent);
Residue mod_pow(const Residue& base, u64 exponent);
/// Modular multiplications square-and-multiply spends on `exponent`.
u64 mod_pow_cost(const Exponent& exponent) noexcept;

/// floor(log2 n) + 1 for n >= 1.
unsigned exponent_bound(u64 n) noexcept;

/// Least r >= 1 with a^r = 1, by successive multiplication.
u64 order_bruteforce(const Residue& a);

/// Exact order of a given any positive multiple of it.
u64 order_from_multiple(const Residue& a, u64 multiple);

TwoAdicSplit two_adic_split(u64 n);

/// Order of u^d in a cyclic group of order n generated by u.
u64 cyclic_power_order(u64 n, u64 d);

bool is_prime(u64 n) noexcept;
/// floor(n^(1/k))
u64 integer_root(u64 n, unsigned k) noexcept;
/// Prime factorization by trial division, ascending primes.
std::vector<PrimePower> factorize(u64 n);

ScreenResult screen_input(u64 n, u64 max_modulus = kDefaultModulusCap);

CrtProfile crt_profile(const Residue& a, const std::vector<PrimePower>& prime_powers);

/// 1 - (m+1)/2^m
Rational p_success(unsigned m);
/// ((m+1)/2^m)^t, the bound on t independent failures.
Rational failure_bound(unsigned m, unsigned trials);

}  // namespace diffusion_factor
