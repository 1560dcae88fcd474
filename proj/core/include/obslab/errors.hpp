#pragma once

#include <stdexcept>
#include <string>

namespace obslab {

// Invalid arguments are reported with std::invalid_argument throughout; the
// types below cover the numerical failure modes.

class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationDivergedError : public std::runtime_error {
public:
    IntegrationDivergedError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

class BudgetExceededError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace obslab
