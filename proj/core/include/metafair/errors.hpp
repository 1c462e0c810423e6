#pragma once

#include <stdexcept>
#include <string>

namespace metafair {

/// Base error for the whole library. `code()` is a stable machine-readable
/// identifier; `what()` carries the human diagnostic.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class RelationDimensionMismatch : public Error {
public:
    explicit RelationDimensionMismatch(const std::string& msg)
        : Error("relation_dimension_mismatch", msg) {}
};

class UnknownRelation : public Error {
public:
    explicit UnknownRelation(const std::string& msg) : Error("unknown_relation", msg) {}
};

class UnknownTemplate : public Error {
public:
    explicit UnknownTemplate(const std::string& msg) : Error("unknown_template", msg) {}
};

class CatalogueFormatError : public Error {
public:
    CatalogueFormatError(const std::string& key, const std::string& msg)
        : Error("catalogue_format_error", msg), key_(key) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class SampleTooLarge : public Error {
public:
    explicit SampleTooLarge(const std::string& msg) : Error("sample_too_large", msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config_error", msg) {}
};

class TransportError : public Error {
public:
    explicit TransportError(const std::string& msg) : Error("transport_error", msg) {}
};

class AuthError : public Error {
public:
    explicit AuthError(const std::string& msg) : Error("auth_error", msg) {}
};

class TimeoutError : public Error {
public:
    explicit TimeoutError(const std::string& msg) : Error("timeout_error", msg) {}
};

class MalformedBackendResponse : public Error {
public:
    explicit MalformedBackendResponse(const std::string& msg)
        : Error("malformed_backend_response", msg) {}
};

class NoJsonArrayFound : public Error {
public:
    explicit NoJsonArrayFound(const std::string& msg) : Error("no_json_array_found", msg) {}
};

class NotAScaffold : public Error {
public:
    explicit NotAScaffold(const std::string& msg) : Error("not_a_scaffold", msg) {}
};

class InvalidExecution : public Error {
public:
    explicit InvalidExecution(const std::string& msg) : Error("invalid_execution", msg) {}
};

class ProviderUnreachable : public Error {
public:
    explicit ProviderUnreachable(const std::string& msg) : Error("provider_unreachable", msg) {}
};

class MissingJudge : public Error {
public:
    explicit MissingJudge(const std::string& msg) : Error("missing_judge", msg) {}
};

class ModeRelationMismatch : public Error {
public:
    explicit ModeRelationMismatch(const std::string& msg)
        : Error("mode_relation_mismatch", msg) {}
};

class WrongCommitteeSize : public Error {
public:
    explicit WrongCommitteeSize(const std::string& msg) : Error("wrong_committee_size", msg) {}
};

class KeySetMismatch : public Error {
public:
    explicit KeySetMismatch(const std::string& msg) : Error("key_set_mismatch", msg) {}
};

class DegenerateDataset : public Error {
public:
    explicit DegenerateDataset(const std::string& msg) : Error("degenerate_dataset", msg) {}
};

class RaggedGroups : public Error {
public:
    explicit RaggedGroups(const std::string& msg) : Error("ragged_groups", msg) {}
};

class EmptyGroup : public Error {
public:
    explicit EmptyGroup(const std::string& msg) : Error("empty_group", msg) {}
};

class LengthMismatch : public Error {
public:
    explicit LengthMismatch(const std::string& msg) : Error("length_mismatch", msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io_error", msg) {}
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error("schema_error", msg) {}
};

}  // namespace metafair
