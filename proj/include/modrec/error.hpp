#pragma once

#include <stdexcept>
#include <string>

namespace modrec {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed arguments that violate an operation's preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Input data is malformed or unusable (bad CSV row, degenerate feature column, ...).
class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace modrec
