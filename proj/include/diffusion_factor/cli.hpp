#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffusion_factor/factor.hpp"

namespace diffusion_factor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNoAnswer = 2;

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 17 significant digits, round-trips through strtod.
std::string probability_string(double p);
std::string rational_string(const Rational& q);

nlohmann::json ledger_json(const StepLedger& ledger);
nlohmann::json outcome_json(const FactorOutcome& outcome);
nlohmann::json order_json(const OrderResult& result);

}  // namespace diffusion_factor::cli
