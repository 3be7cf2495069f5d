#pragma once

#include <stdexcept>
#include <string>

namespace aclab {

// Thrown when an id does not resolve to any entity. Distinct from a Deny:
// a Deny is a policy answer, a NotFoundError means the question itself
// referenced something that does not exist.
struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by the dataset generator when an action cannot reach its
// configured share given the workflow constraints (e.g. too few users).
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace aclab
