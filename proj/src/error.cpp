#include "go4align/error.hpp"

namespace go4align {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidTaskCount: return "invalid-task-count";
    case ErrorCode::kNonpositiveRisk: return "nonpositive-risk";
    case ErrorCode::kInvalidState: return "invalid-state";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kInvalidK: return "invalid-k";
    case ErrorCode::kSingularAssignment: return "singular-assignment";
    case ErrorCode::kWrongStrategy: return "wrong-strategy";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kDivision: return "division";
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace go4align
