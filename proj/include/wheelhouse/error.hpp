#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wheelhouse {

// Base class for every domain error the library raises. The CLI maps these to
// exit code 1; anything else is a usage or internal error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StructureError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::string what, std::vector<std::string> diagnostics)
        : Error(std::move(what)), diagnostics_(std::move(diagnostics)) {}

    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

class InconsistentEvidence : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    SchemaError(std::string what, std::vector<std::string> missing = {})
        : Error(std::move(what)), missing_(std::move(missing)) {}

    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class DegenerateTest : public Error {
public:
    using Error::Error;
};

class LlmError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace wheelhouse
