#include "ads/error.hpp"

namespace ads {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::AlreadyLabeled: return "AlreadyLabeled";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::EmptyNegativePool: return "EmptyNegativePool";
    case ErrorCode::EmptyLabeledPool: return "EmptyLabeledPool";
    case ErrorCode::ZeroBudget: return "ZeroBudget";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::OracleTimeout: return "OracleTimeout";
    case ErrorCode::NotPending: return "NotPending";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace ads
