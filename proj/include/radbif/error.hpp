#ifndef RADBIF_ERROR_HPP
#define RADBIF_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace radbif {

/// Failure categories raised by the library. The CLI maps them to exit codes.
enum class ErrorKind {
  ParameterDomain,
  StepSizeUnderflow,
  MaxStepsExceeded,
  NonFiniteState,
  IntervalNotCovered,
  HorizonExceeded,
  BracketingFailed,
  DegenerateDenominator,
  BudgetExceeded,
  NoCrossingFound,
  AlphaOutOfRange,
  NoSolution,
  FrameMismatch,
  NotPositive,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParameterDomain: return "ParameterDomain";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::IntervalNotCovered: return "IntervalNotCovered";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::BracketingFailed: return "BracketingFailed";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NoCrossingFound: return "NoCrossingFound";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::FrameMismatch: return "FrameMismatch";
    case ErrorKind::NotPositive: return "NotPositive";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the numerical machinery rather than of the caller's input.
  bool is_numerical() const noexcept {
    return kind_ != ErrorKind::ParameterDomain && kind_ != ErrorKind::AlphaOutOfRange &&
           kind_ != ErrorKind::FrameMismatch;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace radbif

#endif  // RADBIF_ERROR_HPP
