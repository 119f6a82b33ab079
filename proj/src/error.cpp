#include "contourfit/error.hpp"

namespace contourfit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateQuintuple: return "DegenerateQuintuple";
    case ErrorCode::NotAnEllipse: return "NotAnEllipse";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::EmptyIntersections: return "EmptyIntersections";
    case ErrorCode::NoEnclosingEllipse: return "NoEnclosingEllipse";
    case ErrorCode::NoInliers: return "NoInliers";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::ConstantImage: return "ConstantImage";
    case ErrorCode::NoForeground: return "NoForeground";
    case ErrorCode::NoEdges: return "NoEdges";
    case ErrorCode::UnknownAlgorithm: return "UnknownAlgorithm";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace contourfit
