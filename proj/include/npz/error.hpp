#pragma once

#include <stdexcept>
#include <string>

namespace npz {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class NonFiniteInput : public Error {
public:
    using Error::Error;
};

class StepOverflow : public Error {
public:
    StepOverflow(double time, const std::string& what)
        : Error("step overflow at t=" + std::to_string(time) + ": " + what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

class ToleranceNotMet : public Error {
public:
    using Error::Error;
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

class WindowTooShort : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace npz
