#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aclab/decision.hpp"
#include "aclab/dsl/validate.hpp"
#include "aclab/explain.hpp"
#include "aclab/model.hpp"

namespace aclab::dsl {

struct CompiledCondition {
    std::string id;
    ExprPtr expr;
    bool synthetic_guard = false; // injected resource-type check
};

struct CompiledPolicy {
    std::string policy_id; // as written in the doc
    ActionKind action = ActionKind::UploadHomework;
    std::vector<CompiledCondition> conditions;
};

// Immutable after compile; safe to share across threads.
class CompiledPolicySet {
  public:
    const CompiledPolicy* find(ActionKind action) const;
    const std::map<ActionKind, CompiledPolicy>& policies() const { return policies_; }

    // Evaluates every condition of the governing policy, no
    // short-circuit. No policy for the action yields a NoPolicy Deny.
    Decision evaluate(const StateSnapshot& snap, const AccessRequest& request,
                      const ExplanationTemplates& templates =
                          ExplanationTemplates::builtin()) const;
    Decision evaluate(const WorldState& state, const AccessRequest& request,
                      const ExplanationTemplates& templates =
                          ExplanationTemplates::builtin()) const;

  private:
    friend CompiledPolicySet compile(const ValidatedDoc& doc);
    std::map<ActionKind, CompiledPolicy> policies_;
};

// Lowers a validated doc. Every policy whose action targets an existing
// resource gets an implicit leading resource-type condition
// ("<policy>.resource_is_<type>") so evaluation is total over snapshots
// of any type. Throws std::invalid_argument if the doc failed validation.
CompiledPolicySet compile(const ValidatedDoc& doc);

// parse + validate + compile of a policy file. Throws ParseError or
// std::runtime_error (listing the semantic errors) on bad input.
CompiledPolicySet compile_file(const std::string& path, Dialect dialect = Dialect::Full);
CompiledPolicySet compile_text(const std::string& source, Dialect dialect = Dialect::Full);

} // namespace aclab::dsl
