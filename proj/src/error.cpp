#include "cardioreg/error.hpp"

namespace cardioreg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NumericalCollapse: return "NumericalCollapse";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidData: return "InvalidData";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cardioreg
