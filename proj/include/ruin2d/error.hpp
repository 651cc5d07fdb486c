#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ruin2d {

/// Invalid argument or parameter outside the support of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical routine failed to reach its tolerance (quadrature cap, underflow, ...).
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::string diagnostics = {})
        : std::runtime_error(what + (diagnostics.empty() ? "" : " [" + diagnostics + "]")),
          diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

/// The requested method is not available for the given distribution family.
class UnsupportedMethodError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A Monte Carlo run hit its resource cap; carries the number of completed paths.
class PartialResultError : public std::runtime_error {
public:
    PartialResultError(const std::string& what, std::uint64_t completed)
        : std::runtime_error(what), completed_(completed) {}

    std::uint64_t completed() const noexcept { return completed_; }

private:
    std::uint64_t completed_;
};

/// Conditioned sampling would need an unreasonable number of paths.
class TooRareError : public std::runtime_error {
public:
    TooRareError(const std::string& what, std::uint64_t attempts, std::uint64_t hits)
        : std::runtime_error(what), attempts_(attempts), hits_(hits) {}

    std::uint64_t attempts() const noexcept { return attempts_; }
    std::uint64_t hits() const noexcept { return hits_; }

private:
    std::uint64_t attempts_;
    std::uint64_t hits_;
};

/// Experiment configuration rejected at load time; `field` is a JSON-pointer-like path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace ruin2d
