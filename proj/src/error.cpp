#include "symdx/error.hpp"

namespace symdx {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::EmptyRecord: return "EmptyRecord";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownSymptomInSeverityFile: return "UnknownSymptomInSeverityFile";
    case ErrorCode::DuplicateSeverityEntry: return "DuplicateSeverityEntry";
    case ErrorCode::OutOfVocabularySymptom: return "OutOfVocabularySymptom";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::KOutOfRange: return "KOutOfRange";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptySubset: return "EmptySubset";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::ModelFormat: return "ModelFormat";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::NonFinite:
    case ErrorCode::SingularSystem:
    case ErrorCode::NonFiniteLoss:
        return ErrorCategory::numerical;
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::FractionOutOfRange:
    case ErrorCode::KOutOfRange:
        return ErrorCategory::usage;
    default:
        return ErrorCategory::data;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

} // namespace symdx
