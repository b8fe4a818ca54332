#pragma once

#include <stdexcept>
#include <string>

namespace scholarlink {

// Exit-code classes used by the CLI: 0 success, 2 usage, 3 config,
// 4 backend/provider, 5 data/schema.
enum class ErrorClass { usage = 2, config = 3, gateway = 4, data = 5 };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const { return cls_; }

private:
    ErrorClass cls_;
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorClass::data, "parse error: " + what) {}
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(ErrorClass::data, "schema error: " + what) {}
};

struct EmptyName : Error {
    EmptyName() : Error(ErrorClass::data, "name is empty after whitespace normalization") {}
};

struct MissingExtra : Error {
    explicit MissingExtra(const std::string& field)
        : Error(ErrorClass::data, "query strategy requires missing field: " + field), field(field) {}
    std::string field;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorClass::config, "config error: " + what) {}
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorClass::usage, what) {}
};

struct DatasetError : Error {
    explicit DatasetError(const std::string& what) : Error(ErrorClass::data, "dataset error: " + what) {}
};

// search-gateway
struct BackendUnavailable : Error {
    explicit BackendUnavailable(const std::string& what)
        : Error(ErrorClass::gateway, "backend unavailable: " + what) {}
};

struct QuotaExceeded : Error {
    explicit QuotaExceeded(const std::string& what) : Error(ErrorClass::gateway, "quota exceeded: " + what) {}
};

struct FetchError : Error {
    FetchError(int status, const std::string& url)
        : Error(ErrorClass::gateway, "fetch failed (" + std::to_string(status) + "): " + url),
          status(status) {}
    int status;
};

struct ExtractionEmpty : Error {
    explicit ExtractionEmpty(const std::string& url)
        : Error(ErrorClass::data, "no main text extracted from " + url) {}
};

struct DuplicateBackend : Error {
    explicit DuplicateBackend(const std::string& name)
        : Error(ErrorClass::gateway, "backend already registered: " + name) {}
};

// llm-gateway
struct ProviderError : Error {
    explicit ProviderError(const std::string& what) : Error(ErrorClass::gateway, "provider error: " + what) {}
};

struct DuplicateProvider : Error {
    explicit DuplicateProvider(const std::string& name)
        : Error(ErrorClass::gateway, "provider already registered: " + name) {}
};

struct SchemaViolation : Error {
    SchemaViolation(const std::string& last_error, int retries)
        : Error(ErrorClass::data,
                "output failed schema validation after " + std::to_string(retries) +
                    " retries: " + last_error),
          last_validation_error(last_error) {}
    std::string last_validation_error;
};

struct ContentRefusal : Error {
    explicit ContentRefusal(const std::string& what) : Error(ErrorClass::gateway, "refused: " + what) {}
};

}  // namespace scholarlink
