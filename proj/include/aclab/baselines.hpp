#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "aclab/decision.hpp"
#include "aclab/dsl/compile.hpp"
#include "aclab/model.hpp"

namespace aclab {

struct DatasetRecord;

// Role-based engine. Decisions depend only on the requester's roles and
// the action; world state is never consulted.
struct RbacConfig {
    std::map<UserId, std::set<std::string>> role_assignments;
    std::map<std::string, std::set<ActionKind>> permissions;
    // Roles granted to users missing from role_assignments. The fitted
    // config uses this so the single "student" role covers every user.
    std::set<std::string> default_roles;
};

// Allow iff any role of the requester permits the action. Unknown user
// with empty default_roles raises NotFoundError.
Decision rbac_decide(const RbacConfig& config, const AccessRequest& request);

// Strongest single-role config consistent with the paradigm: one role
// "student" held by everyone, permitting exactly the actions whose
// majority label in train is allow (ties deny). Throws
// std::invalid_argument on an empty dataset.
RbacConfig rbac_fit_majority(const std::vector<DatasetRecord>& train);

// Attribute-based engine: a compiled policy set restricted to the scalar
// dialect plus constant verdicts for the actions the dialect cannot
// express. fit_constants fills those from majority labels in train.
struct AbacRuleSet {
    dsl::CompiledPolicySet rules;
    std::map<ActionKind, Verdict> constant_verdicts; // actions absent from rules
};

AbacRuleSet abac_load(const std::string& path);
AbacRuleSet abac_from_text(const std::string& source);
void abac_fit_constants(AbacRuleSet& rules, const std::vector<DatasetRecord>& train);

Decision abac_decide(const AbacRuleSet& rules, const StateSnapshot& snap,
                     const AccessRequest& request);
Decision abac_decide(const AbacRuleSet& rules, const WorldState& state,
                     const AccessRequest& request);

// Discretionary engine: per-resource ACLs plus fixed owner grants.
// Owner grants: homework author gets replace+submit, review creator gets
// revise, grade creator gets append, and upload is granted to everyone.
struct DacAcl {
    std::map<ResourceId, std::map<UserId, std::set<ActionKind>>> entries;
};

Decision dac_decide(const DacAcl& acl, const StateSnapshot& snap,
                    const AccessRequest& request);
Decision dac_decide(const DacAcl& acl, const WorldState& state,
                    const AccessRequest& request);

// Explicit grant/revoke on top of the owner defaults. Revoking an absent
// entry is a no-op. Unknown resource raises NotFoundError.
DacAcl dac_grant(DacAcl acl, const WorldState& state, const ResourceId& resource,
                 const UserId& user, ActionKind action);
DacAcl dac_revoke(DacAcl acl, const WorldState& state, const ResourceId& resource,
                  const UserId& user, ActionKind action);

} // namespace aclab
