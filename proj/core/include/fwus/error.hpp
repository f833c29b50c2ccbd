#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fwus {

enum class ErrorCode {
  kInvalidParameter,
  kNonIntegrableInfluence,
  kDegenerateChain,
  kDivergentSeries,
  kNoFeasibleSleep,
  kShape,
  kInvalidDataset,
  kFitFailure,
  kModelNotReady,
  kMissingPredictor,
  kUnsortedSchedule,
  kUnknownExperiment,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map them to exit statuses and messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace fwus
