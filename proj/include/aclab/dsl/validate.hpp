#pragma once

#include <string>
#include <vector>

#include "aclab/dsl/ast.hpp"

namespace aclab::dsl {

// Full: everything the grammar offers. AbacScalar: attribute comparisons
// only; builtin calls and the resource.homework path are rejected. The
// restricted dialect is what the attribute-based baseline is allowed to
// express.
enum class Dialect { Full, AbacScalar };

struct SemanticError {
    std::string message;
    int line = 1;
    int column = 1;
};

// Doc with action names resolved and condition ids synthesized where
// unlabeled.
struct ValidatedDoc {
    PolicyDoc doc;
};

struct ValidationResult {
    ValidatedDoc validated;
    std::vector<SemanticError> errors; // empty means valid

    bool ok() const { return errors.empty(); }
};

// Checks action names, attribute-path validity for the action's resource
// type, builtin arity and argument names, boolean typing of every
// requirement, and condition-id uniqueness. Collects every error rather
// than stopping at the first.
ValidationResult validate(const PolicyDoc& doc, Dialect dialect = Dialect::Full);

} // namespace aclab::dsl
