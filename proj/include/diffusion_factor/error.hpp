#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diffusion_factor {

enum class Errc {
  NotAUnit,
  BadFactorization,
  OutOfRange,
  PreconditionViolated,
  UnknownVertex,
  NonpositiveProbability,
  EmptyMeasurements,
  OrderNotOdd,
  DecodeFailure,
  WitnessInvalid,
  LiftFailure,
  ScreenRejected,
  TooLarge,
  EngineError,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace diffusion_factor
