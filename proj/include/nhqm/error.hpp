#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nhqm {

enum class Errc {
  NonDiagonalizable,
  NumericalFailure,
  SingularFrame,
  NotHermitian,
  NotPositiveDefinite,
  DomainError,
  DimensionOverflow,
  DimensionMismatch,
  ZeroState,
  ComplexSpectrum,
  DegenerateOverlap,
  NotAMetric,
  SingularEta,
  BrokenRegime,
  NotParaHermitian,
  DegenerateSpectrum,
  NoCycleFound,
  BadGauge,
  NotInFiber,
  NotCyclic,
  GridParseError,
  ParseError,
};

const char* errc_name(Errc c);

/// Library-wide exception. Carries a machine-readable code plus named
/// numeric diagnostics (condition numbers, defects) for error envelopes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::vector<std::pair<std::string, double>> diagnostics = {})
      : std::runtime_error(message), code_(code), diagnostics_(std::move(diagnostics)) {}

  Errc code() const noexcept { return code_; }
  const char* code_name() const noexcept { return errc_name(code_); }
  const std::vector<std::pair<std::string, double>>& diagnostics() const noexcept {
    return diagnostics_;
  }

 private:
  Errc code_;
  std::vector<std::pair<std::string, double>> diagnostics_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message,
                              std::vector<std::pair<std::string, double>> diagnostics = {}) {
  throw Error(code, message, std::move(diagnostics));
}

}  // namespace nhqm
