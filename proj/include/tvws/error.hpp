#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tvws {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters: ranges that do not divide, non-positive widths, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

// A precondition on a call argument was violated.
class ArgumentError : public Error {
public:
    using Error::Error;
};

class OutOfBandError : public Error {
public:
    using Error::Error;
};

// Malformed input document. `path` is a JSON-pointer-like location of the
// offending field ("" when the document itself is unreadable).
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// The front-end was asked to tune outside its range.
class TuneError : public Error {
public:
    explicit TuneError(std::int64_t frequency_hz)
        : Error("cannot tune to " + std::to_string(frequency_hz) + " Hz"),
          frequency_hz_(frequency_hz) {}

    std::int64_t frequency_hz() const noexcept { return frequency_hz_; }

private:
    std::int64_t frequency_hz_;
};

} // namespace tvws
