#pragma once

#include <string>
#include <vector>

#include "aclab/action.hpp"
#include "aclab/decision.hpp"
#include "aclab/explain.hpp"
#include "aclab/model.hpp"

namespace aclab {

// Ordered condition ids checked by the policy guarding an action. The
// first entry of every non-upload policy is the resource-type guard.
const std::vector<std::string>& policy_conditions(ActionKind action);

// All condition ids across all policies, in (policy, catalog) order.
const std::vector<std::string>& all_condition_ids();

// Reference decision procedure. Evaluates every condition of the
// governing policy against the snapshot; the verdict is Allow iff all
// hold. Condition evaluation is total: type-guard failures leave the
// remaining conditions evaluated against the snapshot as-is.
Decision decide(const StateSnapshot& snap, const AccessRequest& request,
                const ExplanationTemplates& templates = ExplanationTemplates::builtin());

// Convenience overload: projects the snapshot from full state, then
// decides. Unknown requester or (for non-upload actions) unknown resource
// raises NotFoundError. For upload_homework the resource id must be
// unused; an existing id raises std::invalid_argument.
Decision decide(const WorldState& state, const AccessRequest& request,
                const ExplanationTemplates& templates = ExplanationTemplates::builtin());

// True when the single condition holds on the snapshot. Unknown id
// raises std::invalid_argument.
bool eval_condition(const std::string& condition_id, const StateSnapshot& snap,
                    const AccessRequest& request);

// Assembles the explanation line for an already-evaluated decision:
// denials render the violated clauses, approvals the satisfied ones.
std::string render_explanation(const Decision& decision, const AccessRequest& request,
                               const StateSnapshot& snap,
                               const ExplanationTemplates& templates);

} // namespace aclab
