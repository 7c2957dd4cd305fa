#include "retire/errors.hpp"

#include <cstdio>

namespace retire {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

FloorError::FloorError(std::string field, double value, double bound)
    : DomainError(std::move(field), ">= " + fmt(bound) + " (got " + fmt(value) + ")"),
      value_(value), bound_(bound) {}

IllConditioned::IllConditioned(double condition, double z_guess)
    : Error("pasting system condition " + fmt(condition) + " at z=" + fmt(z_guess)),
      condition_(condition), z_guess_(z_guess) {}

WealthBelowFloor::WealthBelowFloor(double x, double floor)
    : Error("wealth " + fmt(x) + " below floor " + fmt(floor)), x_(x), floor_(floor) {}

NumericalBlowup::NumericalBlowup(std::size_t path, std::size_t step, double x)
    : Error("path " + std::to_string(path) + " blew up at step " + std::to_string(step) +
            " (X=" + fmt(x) + ")"),
      path_(path), step_(step) {}

}  // namespace retire
