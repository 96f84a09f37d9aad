#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace magdirac {

enum class Errc {
  InvalidArgument,
  InvalidB,
  NoConvergence,
  GridTooCoarse,
  InvalidResolution,
  GridMismatch,
  TruncationExceeded,
  UnsupportedCombination,
  NonFiniteMultiplier,
  ResonantTime,
  QuadratureFailure,
  LeakageError,
  TruncationOverflow,
  TruncationTooSmall,
  UnsupportedPair,
  NotAdmissible,
  ParseError,
  ValidationError,
  IoError,
  CheckFailed,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace magdirac
