#pragma once

#include <stdexcept>
#include <string>

namespace torusqm {

// Exit codes used by the command-line tool.
enum class ExitCode : int {
    Success = 0,
    ConfigError = 1,
    VerificationFailure = 2,
    NumericalError = 3,
};

/// Invalid user input: geometry, sweep range, basis sizes, config file contents.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical contract was violated (non-finite input, lost orthogonality,
/// non-Hermitian matrix, failed grid refinement).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegeneracyError : public NumericalError {
public:
    DegeneracyError(const std::string& what, std::size_t index)
        : NumericalError(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class AccuracyError : public NumericalError {
public:
    AccuracyError(const std::string& what, double coarse, double fine)
        : NumericalError(what), coarse_(coarse), fine_(fine) {}
    double coarse() const noexcept { return coarse_; }
    double fine() const noexcept { return fine_; }

private:
    double coarse_;
    double fine_;
};

}  // namespace torusqm
