#pragma once

#include <stdexcept>
#include <string>

namespace graphtune {

/// Base class for all graphtune errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- configuration space ---

class OutOfDomainError : public Error {
public:
    OutOfDomainError(const std::string& field, const std::string& value, const std::string& bounds)
        : Error("out of domain: " + field + "=" + value + " (allowed: " + bounds + ")"),
          field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class UnknownTemplateError : public Error {
public:
    explicit UnknownTemplateError(const std::string& id)
        : Error("unknown prompt template: " + id) {}
};

class UnboundPlaceholderError : public Error {
public:
    explicit UnboundPlaceholderError(const std::string& name)
        : Error("unbound template placeholder: {" + name + "}") {}
};

// --- corpus ---

class ParseError : public Error {
public:
    ParseError(const std::string& where, const std::string& detail)
        : Error("parse error at " + where + ": " + detail) {}
};

class UnknownAdapterError : public Error {
public:
    explicit UnknownAdapterError(const std::string& name)
        : Error("unknown dataset adapter: " + name) {}
};

class EmptyDatasetError : public Error {
public:
    explicit EmptyDatasetError(const std::string& path)
        : Error("dataset contains no instances: " + path) {}
};

class InsufficientInstancesError : public Error {
public:
    InsufficientInstancesError(std::size_t needed, std::size_t available)
        : Error("insufficient instances: need " + std::to_string(needed) + ", have " +
                std::to_string(available)) {}
};

// --- stores ---

class DuplicateIdError : public Error {
public:
    DuplicateIdError(const std::string& collection, const std::string& id)
        : Error("duplicate id '" + id + "' in collection '" + collection + "'") {}
};

class UnknownCollectionError : public Error {
public:
    explicit UnknownCollectionError(const std::string& name)
        : Error("unknown vector collection: " + name) {}
};

class UnknownNodeError : public Error {
public:
    explicit UnknownNodeError(const std::string& id) : Error("unknown graph node: " + id) {}
};

class EmptyStoreError : public Error {
public:
    explicit EmptyStoreError(const std::string& what) : Error(what) {}
};

// --- gateway ---

/// Severity classes for model-call failures. Transient errors are retried by
/// the live backend; fatal and parse failures are not.
enum class GatewayFault { Transient, Fatal, ParseFailure };

class GatewayError : public Error {
public:
    GatewayError(GatewayFault fault, const std::string& detail)
        : Error("gateway error: " + detail), fault_(fault) {}
    GatewayFault fault() const { return fault_; }

private:
    GatewayFault fault_;
};

class CacheMissError : public Error {
public:
    explicit CacheMissError(const std::string& digest)
        : Error("replay cache miss in strict offline mode (digest " + digest + ")") {}
};

class MalformedExtractionError : public Error {
public:
    explicit MalformedExtractionError(const std::string& detail)
        : Error("malformed extraction output: " + detail) {}
};

// --- evaluation ---

class EmptyScoreListError : public Error {
public:
    EmptyScoreListError() : Error("cannot aggregate an empty score list") {}
};

class MixedMetricsError : public Error {
public:
    MixedMetricsError() : Error("score list mixes different metrics") {}
};

class TooFewValuesError : public Error {
public:
    explicit TooFewValuesError(std::size_t n)
        : Error("bootstrap needs >= 2 values, got " + std::to_string(n)) {}
};

// --- optimizer ---

class StudyClosedError : public Error {
public:
    StudyClosedError() : Error("study is closed") {}
};

class NoCompleteTrialsError : public Error {
public:
    NoCompleteTrialsError() : Error("study has no complete trials") {}
};

// --- runner ---

class ConfigFileError : public Error {
public:
    ConfigFileError(const std::string& where, const std::string& detail)
        : Error("config error at " + where + ": " + detail) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

class OfflineViolationError : public Error {
public:
    explicit OfflineViolationError(const std::string& what)
        : Error("GT_OFFLINE=1 forbids network use: " + what) {}
};

} // namespace graphtune
