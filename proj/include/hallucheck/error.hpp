#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hallucheck {

enum class ErrorCode {
    NoReferencesSection,
    NoIdentifier,
    MalformedIdentifier,
    IoError,
    BibtexSyntaxError,
    FormatError,
    XmlError,
    DuplicateId,
    VersionMismatch,
    EmptyQuery,
    NetworkError,
    ServiceError,
    ParseError,
    OfflineMiss,
    EmptyInput,
    InconsistentTotals,
    EmptyCorpus,
    IndexLoadError,
    NoInputs,
    BindError,
    CorruptLog,
    ValidationError,
    UnknownFormat,
    ConfigError,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace hallucheck
