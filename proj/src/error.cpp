#include "graphfilter/error.hpp"

namespace graphfilter {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SelfLoopInInput: return "SelfLoopInInput";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::UnsupportedScheme: return "UnsupportedScheme";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::OrderTooLarge: return "OrderTooLarge";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::MethodUnsupported: return "MethodUnsupported";
    case ErrorCode::BasisMismatch: return "BasisMismatch";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::UnsupportedBasis: return "UnsupportedBasis";
    case ErrorCode::NotDiagonalizableByThisOracle: return "NotDiagonalizableByThisOracle";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::PoleInDomain: return "PoleInDomain";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace graphfilter
