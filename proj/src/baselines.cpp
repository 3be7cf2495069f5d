#include <stdexcept>

#include "aclab/baselines.hpp"
#include "aclab/dataset.hpp"

namespace aclab {

namespace {

Decision tagged_decision(Verdict verdict, const char* tag, std::string condition,
                         std::string explanation) {
    Decision decision;
    decision.verdict = verdict;
    decision.policy = PolicyId::NoPolicy;
    decision.policy_label = tag;
    if (verdict == Verdict::Allow) {
        decision.satisfied.push_back(std::move(condition));
    } else {
        decision.violated.push_back(std::move(condition));
    }
    decision.explanation = std::move(explanation);
    return decision;
}

} // namespace

Decision rbac_decide(const RbacConfig& config, const AccessRequest& request) {
    const std::set<std::string>* roles = nullptr;
    if (auto it = config.role_assignments.find(request.user);
        it != config.role_assignments.end()) {
        roles = &it->second;
    } else if (!config.default_roles.empty()) {
        roles = &config.default_roles;
    } else {
        throw NotFoundError("rbac: unknown user " + request.user);
    }
    std::string action_name(to_string(request.action));
    for (const std::string& role : *roles) {
        auto perm_it = config.permissions.find(role);
        if (perm_it != config.permissions.end() && perm_it->second.count(request.action) > 0) {
            return tagged_decision(Verdict::Allow, "rbac", "rbac.role_permits",
                                   "ALLOW: rbac — role " + role + " permits " + action_name);
        }
    }
    return tagged_decision(Verdict::Deny, "rbac", "rbac.role_permits",
                           "DENY: rbac — no role of " + request.user + " permits " +
                               action_name);
}

RbacConfig rbac_fit_majority(const std::vector<DatasetRecord>& train) {
    if (train.empty()) throw std::invalid_argument("rbac_fit_majority: empty training set");
    std::map<ActionKind, std::pair<std::size_t, std::size_t>> counts; // allow, deny
    for (const DatasetRecord& record : train) {
        auto& entry = counts[record.request.action];
        if (record.decision == Verdict::Allow) {
            ++entry.first;
        } else {
            ++entry.second;
        }
    }
    RbacConfig config;
    config.default_roles.insert("student");
    std::set<ActionKind>& permitted = config.permissions["student"];
    for (const auto& [action, tally] : counts) {
        if (tally.first > tally.second) permitted.insert(action);
    }
    return config;
}

AbacRuleSet abac_from_text(const std::string& source) {
    AbacRuleSet rules;
    rules.rules = dsl::compile_text(source, dsl::Dialect::AbacScalar);
    return rules;
}

AbacRuleSet abac_load(const std::string& path) {
    AbacRuleSet rules;
    rules.rules = dsl::compile_file(path, dsl::Dialect::AbacScalar);
    return rules;
}

void abac_fit_constants(AbacRuleSet& rules, const std::vector<DatasetRecord>& train) {
    if (train.empty()) throw std::invalid_argument("abac_fit_constants: empty training set");
    std::map<ActionKind, std::pair<std::size_t, std::size_t>> counts;
    for (const DatasetRecord& record : train) {
        auto& entry = counts[record.request.action];
        if (record.decision == Verdict::Allow) {
            ++entry.first;
        } else {
            ++entry.second;
        }
    }
    rules.constant_verdicts.clear();
    for (ActionKind action : kAllActions) {
        if (rules.rules.find(action) != nullptr) continue;
        auto it = counts.find(action);
        bool majority_allow = it != counts.end() && it->second.first > it->second.second;
        rules.constant_verdicts[action] = majority_allow ? Verdict::Allow : Verdict::Deny;
    }
}

Decision abac_decide(const AbacRuleSet& rules, const StateSnapshot& snap,
                     const AccessRequest& request) {
    if (rules.rules.find(request.action) != nullptr) {
        return rules.rules.evaluate(snap, request);
    }
    Verdict verdict = Verdict::Deny; // unfitted actions fail closed
    if (auto it = rules.constant_verdicts.find(request.action);
        it != rules.constant_verdicts.end()) {
        verdict = it->second;
    }
    std::string action_name(to_string(request.action));
    std::string head = verdict == Verdict::Allow ? "ALLOW" : "DENY";
    return tagged_decision(verdict, "abac", "abac.majority_fit",
                           head + ": abac — majority-fit constant verdict for " + action_name);
}

Decision abac_decide(const AbacRuleSet& rules, const WorldState& state,
                     const AccessRequest& request) {
    if (!state.has_user(request.user)) throw NotFoundError("unknown user: " + request.user);
    if (request.action == ActionKind::UploadHomework) {
        return abac_decide(rules, upload_snapshot(request.resource, request.user), request);
    }
    return abac_decide(rules, snapshot(state, request.resource, request.user), request);
}

namespace {

bool owner_grant_permits(const StateSnapshot& snap, const AccessRequest& request) {
    if (request.action == ActionKind::UploadHomework) return true;
    if (snap.owner.empty() || request.user != snap.owner) return false;
    if (snap.resource_type == "homework") {
        return request.action == ActionKind::ReplaceHomework ||
               request.action == ActionKind::SubmitHomework;
    }
    if (snap.resource_type == "review") {
        return request.action == ActionKind::ReviseReview;
    }
    if (snap.resource_type == "grade") {
        return request.action == ActionKind::AppendReviewToGrade;
    }
    return false;
}

} // namespace

Decision dac_decide(const DacAcl& acl, const StateSnapshot& snap,
                    const AccessRequest& request) {
    bool allowed = owner_grant_permits(snap, request);
    if (!allowed) {
        auto resource_it = acl.entries.find(snap.resource_id);
        if (resource_it != acl.entries.end()) {
            auto user_it = resource_it->second.find(request.user);
            allowed = user_it != resource_it->second.end() &&
                      user_it->second.count(request.action) > 0;
        }
    }
    std::string action_name(to_string(request.action));
    if (allowed) {
        return tagged_decision(Verdict::Allow, "dac", "dac.acl_grants",
                               "ALLOW: dac — acl of " + request.resource + " grants " +
                                   action_name + " to " + request.user);
    }
    return tagged_decision(Verdict::Deny, "dac", "dac.acl_grants",
                           "DENY: dac — acl of " + request.resource + " does not grant " +
                               action_name + " to " + request.user);
}

Decision dac_decide(const DacAcl& acl, const WorldState& state,
                    const AccessRequest& request) {
    if (!state.has_user(request.user)) throw NotFoundError("unknown user: " + request.user);
    if (request.action == ActionKind::UploadHomework) {
        return dac_decide(acl, upload_snapshot(request.resource, request.user), request);
    }
    return dac_decide(acl, snapshot(state, request.resource, request.user), request);
}

DacAcl dac_grant(DacAcl acl, const WorldState& state, const ResourceId& resource,
                 const UserId& user, ActionKind action) {
    if (!state.has_resource(resource)) throw NotFoundError("dac: unknown resource " + resource);
    acl.entries[resource][user].insert(action);
    return acl;
}

DacAcl dac_revoke(DacAcl acl, const WorldState& state, const ResourceId& resource,
                  const UserId& user, ActionKind action) {
    if (!state.has_resource(resource)) throw NotFoundError("dac: unknown resource " + resource);
    auto resource_it = acl.entries.find(resource);
    if (resource_it == acl.entries.end()) return acl;
    auto user_it = resource_it->second.find(user);
    if (user_it == resource_it->second.end()) return acl;
    user_it->second.erase(action);
    if (user_it->second.empty()) resource_it->second.erase(user_it);
    if (resource_it->second.empty()) acl.entries.erase(resource_it);
    return acl;
}

} // namespace aclab
