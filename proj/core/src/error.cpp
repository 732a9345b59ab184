#include "qbm/error.hpp"

#include <utility>

namespace qbm {

ValidationError::ValidationError(std::string field, const std::string& what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

NumericalAlarm::NumericalAlarm(const std::string& what, long step)
    : std::runtime_error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
      step_(step) {}

void require(bool condition, const std::string& field, const std::string& message) {
    if (!condition) throw ValidationError(field, message);
}

} // namespace qbm
