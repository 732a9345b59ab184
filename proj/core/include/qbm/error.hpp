// error.hpp: exception types shared by every qbm module

#pragma once

#include <stdexcept>
#include <string>

namespace qbm {

// Invalid input. `field()` names the offending parameter with a dotted path
// such as "bath.gamma" or "system.mass".
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A numerical run could not complete or produced untrustworthy output
// (non-finite state, truncation leakage, embedding failure, unresolved grid).
class NumericalAlarm : public std::runtime_error {
public:
    explicit NumericalAlarm(const std::string& what, long step = -1);
    long step() const noexcept { return step_; }

private:
    long step_;
};

// Throw ValidationError(field, message) unless `condition` holds.
void require(bool condition, const std::string& field, const std::string& message);

} // namespace qbm
