#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symconj {

enum class ErrorKind {
  NotZeroOne,
  NotSquare,
  TooLarge,
  NotIrreducible,
  PermutationMatrix,
  InadmissibleWord,
  InvalidArgument,
  NotTotal,
  ImageInadmissible,
  StallingCycle,
  DepthOverflow,
  SpaceMismatch,
  InvalidPartition,
  NotConstantOnCylinders,
  NoAlignment,
  PreconditionFailed,
  InconsistentRoutes,
  Parse,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotZeroOne: return "NotZeroOne";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::PermutationMatrix: return "PermutationMatrix";
    case ErrorKind::InadmissibleWord: return "InadmissibleWord";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotTotal: return "NotTotal";
    case ErrorKind::ImageInadmissible: return "ImageInadmissible";
    case ErrorKind::StallingCycle: return "StallingCycle";
    case ErrorKind::DepthOverflow: return "DepthOverflow";
    case ErrorKind::SpaceMismatch: return "SpaceMismatch";
    case ErrorKind::InvalidPartition: return "InvalidPartition";
    case ErrorKind::NotConstantOnCylinders: return "NotConstantOnCylinders";
    case ErrorKind::NoAlignment: return "NoAlignment";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::InconsistentRoutes: return "InconsistentRoutes";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

/// Every library failure is reported through this type; `kind()` is stable
/// and the message carries the offending word, point or depth.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Desk-scale caps.
inline constexpr int kMaxAlphabet = 64;
inline constexpr int kMaxDepth = 24;

}  // namespace symconj
