#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace symdx {

enum class ErrorCode {
    DimensionMismatch,
    NotPositiveDefinite,
    NonSymmetric,
    NonFinite,
    MissingFile,
    EmptyRecord,
    MalformedRow,
    UnknownSymptomInSeverityFile,
    DuplicateSeverityEntry,
    OutOfVocabularySymptom,
    FractionOutOfRange,
    ClassTooSmall,
    KOutOfRange,
    InfeasibleSpec,
    ZeroVector,
    EmptySubset,
    SingularSystem,
    InvalidConfig,
    NonFiniteLoss,
    ZeroRow,
    SingleCluster,
    LabelOutOfRange,
    EmptyMatrix,
    IoFailure,
    ModelFormat,
    InvalidArgument,
};

// Coarse grouping used for CLI exit codes.
enum class ErrorCategory { usage, data, numerical };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

} // namespace symdx
