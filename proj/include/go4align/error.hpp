#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace go4align {

enum class ErrorCode {
  kInvalidTaskCount,
  kNonpositiveRisk,
  kInvalidState,
  kDimension,
  kInvalidK,
  kSingularAssignment,
  kWrongStrategy,
  kDivergence,
  kDivision,
  kInvalidInput,
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the training loop; carries the iteration at which a risk blew up.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t iteration, const std::string& what)
      : Error(ErrorCode::kDivergence, what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace go4align
