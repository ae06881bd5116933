#pragma once

#include <stdexcept>
#include <string>

namespace kp {

// Root of every error the library raises.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define KP_DEFINE_ERROR(Name)       \
  struct Name : Error {             \
    using Error::Error;             \
  }

KP_DEFINE_ERROR(InvalidArgument);
KP_DEFINE_ERROR(UnsupportedOrder);
KP_DEFINE_ERROR(GridTooSmall);
KP_DEFINE_ERROR(DimensionMismatch);
KP_DEFINE_ERROR(EvenGridSize);
KP_DEFINE_ERROR(UnderdeterminedStencil);
KP_DEFINE_ERROR(UnsupportedModeCount);
KP_DEFINE_ERROR(SingularMatrix);
KP_DEFINE_ERROR(TooLargeForDense);
KP_DEFINE_ERROR(ExistenceViolated);
KP_DEFINE_ERROR(UnknownState);
KP_DEFINE_ERROR(MissingParam);
KP_DEFINE_ERROR(DegenerateSamples);
KP_DEFINE_ERROR(PicardDiverged);
KP_DEFINE_ERROR(GmresFailed);
KP_DEFINE_ERROR(BadMagic);
KP_DEFINE_ERROR(TruncatedFile);
KP_DEFINE_ERROR(NonFiniteValue);

#undef KP_DEFINE_ERROR

// Config file syntax error; carries the 1-based line number.
struct ParseError : Error {
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

// Config is well-formed but violates an invariant; `key` names it (e.g. "time.dt").
struct ValidationError : Error {
  explicit ValidationError(std::string key, const std::string& detail = {})
      : Error(detail.empty() ? key : key + ": " + detail), key(std::move(key)) {}
  std::string key;
};

}  // namespace kp
