#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rovlock {

enum class Errc {
  InvalidChannelCount,
  OutOfBounds,
  InvalidSize,
  SizeMismatch,
  InvalidConfig,
  InvalidRoi,
  NotInitialized,
  NotTrained,
  DegenerateSamples,
  DegenerateSampling,
  ZeroVariance,
  MissingGroundTruth,
  TargetNotVisible,
  InvalidSpec,
  EmptyLog,
  MalformedDataset,
  IoError,
};

std::string_view to_string(Errc code);

/// Every failure surfaced by the library carries one of the codes above so
/// callers (and tests) can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace rovlock
