#include "magdirac/error.hpp"

namespace magdirac {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidB: return "InvalidB";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::InvalidResolution: return "InvalidResolution";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::TruncationExceeded: return "TruncationExceeded";
    case Errc::UnsupportedCombination: return "UnsupportedCombination";
    case Errc::NonFiniteMultiplier: return "NonFiniteMultiplier";
    case Errc::ResonantTime: return "ResonantTime";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::LeakageError: return "LeakageError";
    case Errc::TruncationOverflow: return "TruncationOverflow";
    case Errc::TruncationTooSmall: return "TruncationTooSmall";
    case Errc::UnsupportedPair: return "UnsupportedPair";
    case Errc::NotAdmissible: return "NotAdmissible";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::IoError: return "IoError";
    case Errc::CheckFailed: return "CheckFailed";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace magdirac
