#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace retire {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model parameter violates a bound.
class DomainError : public Error {
public:
    DomainError(std::string field, std::string constraint)
        : Error(field + ": requires " + constraint),
          field_(std::move(field)), constraint_(std::move(constraint)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string field_;
    std::string constraint_;
};

/// A wealth floor lies below its admissibility bound.
class FloorError : public DomainError {
public:
    FloorError(std::string field, double value, double bound);
    double value() const noexcept { return value_; }
    double bound() const noexcept { return bound_; }

private:
    double value_;
    double bound_;
};

/// mu == r: the dual dynamics have no diffusion.
class DegenerateMarket : public Error {
public:
    using Error::Error;
};

class BracketFailure : public Error {
public:
    using Error::Error;
};

/// The reduced smooth-fit system of a case has no admissible root.
class NoRoot : public Error {
public:
    NoRoot(int case_number, const std::string& detail)
        : Error("case " + std::to_string(case_number) + ": " + detail), case_(case_number) {}
    int case_number() const noexcept { return case_; }

private:
    int case_;
};

class IllConditioned : public Error {
public:
    IllConditioned(double condition, double z_guess);
    double condition() const noexcept { return condition_; }
    double z_guess() const noexcept { return z_guess_; }

private:
    double condition_;
    double z_guess_;
};

class WealthBelowFloor : public Error {
public:
    WealthBelowFloor(double x, double floor);
    double x() const noexcept { return x_; }
    double floor() const noexcept { return floor_; }

private:
    double x_;
    double floor_;
};

/// A pre-retirement query outside [R_pre, x_bar).
class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Retirement is optimal at every admissible wealth, so there is no threshold.
class ImmediateRetirementCase : public Error {
public:
    ImmediateRetirementCase() : Error("immediate retirement: no retirement threshold") {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalBlowup : public Error {
public:
    NumericalBlowup(std::size_t path, std::size_t step, double x);
    std::size_t path() const noexcept { return path_; }
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t path_;
    std::size_t step_;
};

}  // namespace retire
