#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace structmem {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- store errors ----

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& id)
        : Error("duplicate entry id: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class DimensionMismatchError : public Error {
public:
    DimensionMismatchError(std::size_t expected, std::size_t got)
        : Error("embedding dimension mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)),
          expected_(expected), got_(got) {}
    std::size_t expected() const { return expected_; }
    std::size_t got() const { return got_; }

private:
    std::size_t expected_;
    std::size_t got_;
};

class MalformedTimestampError : public Error {
public:
    explicit MalformedTimestampError(const std::string& raw)
        : Error("malformed timestamp: '" + raw + "'") {}
};

class ZeroVectorError : public Error {
public:
    ZeroVectorError() : Error("cosine similarity undefined for a zero vector") {}
};

// ---- persistence errors ----

class IoError : public Error {
public:
    using Error::Error;
};

class CorruptRecordError : public Error {
public:
    CorruptRecordError(std::size_t line, const std::string& detail)
        : Error("corrupt record at line " + std::to_string(line) + ": " + detail),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class VersionMismatchError : public Error {
public:
    VersionMismatchError(int expected, int got)
        : Error("file format version mismatch: expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

// ---- provider errors ----

class ProviderError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class HttpError : public ProviderError {
public:
    HttpError(int status, const std::string& body)
        : ProviderError("http status " + std::to_string(status) + ": " + body),
          status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

class RateLimitedError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class MalformedResponseError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class EmptyTextError : public Error {
public:
    EmptyTextError() : Error("cannot embed an empty text") {}
};

// ---- configuration / dataset errors ----

class ConfigError : public Error {
public:
    using Error::Error;
};

class DatasetParseError : public Error {
public:
    DatasetParseError(const std::string& path, const std::string& location,
                      const std::string& detail)
        : Error("dataset parse error in " + path + " (" + location + "): " + detail),
          location_(location) {}
    const std::string& location() const { return location_; }

private:
    std::string location_;
};

class EmptyBufferError : public Error {
public:
    EmptyBufferError() : Error("operation requires a non-empty consolidation buffer") {}
};

}  // namespace structmem
