#include "gmrobust/errors.hpp"

namespace gmrobust {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(what), line_(line), column_(column) {}

namespace {

std::string invariant_message(const std::string& invariant, std::size_t layer,
                              const std::string& detail) {
    std::string msg = "model invariant '" + invariant + "' violated";
    if (layer != InvariantError::npos) {
        msg += " in layer " + std::to_string(layer);
    }
    if (!detail.empty()) {
        msg += ": " + detail;
    }
    return msg;
}

} // namespace

InvariantError::InvariantError(std::string invariant, std::size_t layer, const std::string& detail)
    : Error(invariant_message(invariant, layer, detail)), invariant_(std::move(invariant)), layer_(layer), detail_(detail) {}

} // namespace gmrobust
