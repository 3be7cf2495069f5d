#include "aclab/oracle.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace aclab {

namespace {

const std::vector<std::string> kNoConditions = {};
const std::vector<std::string> kP2Conditions = {
    "P2.resource_is_homework", "P2.is_author", "P2.not_submitted"};
const std::vector<std::string> kP3Conditions = {
    "P3.resource_is_homework", "P3.is_author", "P3.not_submitted"};
const std::vector<std::string> kP4Conditions = {
    "P4.resource_is_homework", "P4.submitted",          "P4.not_author",
    "P4.not_prior_reviewer",   "P4.review_count_lt_3",  "P4.ungraded"};
const std::vector<std::string> kP5Conditions = {
    "P5.resource_is_review", "P5.is_creator", "P5.ungraded"};
const std::vector<std::string> kP6Conditions = {
    "P6.resource_is_homework", "P6.min_two_reviews", "P6.not_already_graded"};
const std::vector<std::string> kP7Conditions = {
    "P7.resource_is_review", "P7.is_grade_creator", "P7.review_matches_grade",
    "P7.not_already_appended"};

bool requester_in(const std::vector<UserId>& users, const UserId& requester) {
    return std::find(users.begin(), users.end(), requester) != users.end();
}

} // namespace

const std::vector<std::string>& policy_conditions(ActionKind action) {
    switch (action) {
        case ActionKind::UploadHomework: return kNoConditions;
        case ActionKind::ReplaceHomework: return kP2Conditions;
        case ActionKind::SubmitHomework: return kP3Conditions;
        case ActionKind::ReviewHomework: return kP4Conditions;
        case ActionKind::ReviseReview: return kP5Conditions;
        case ActionKind::GradeHomework: return kP6Conditions;
        case ActionKind::AppendReviewToGrade: return kP7Conditions;
    }
    throw std::logic_error("unreachable ActionKind");
}

const std::vector<std::string>& all_condition_ids() {
    static const std::vector<std::string> all = [] {
        std::vector<std::string> ids;
        for (ActionKind action : kAllActions) {
            const auto& conditions = policy_conditions(action);
            ids.insert(ids.end(), conditions.begin(), conditions.end());
        }
        return ids;
    }();
    return all;
}

bool eval_condition(const std::string& condition_id, const StateSnapshot& snap,
                    const AccessRequest& request) {
    if (condition_id == "P2.resource_is_homework" ||
        condition_id == "P3.resource_is_homework" ||
        condition_id == "P4.resource_is_homework" ||
        condition_id == "P6.resource_is_homework") {
        return snap.resource_type == "homework";
    }
    if (condition_id == "P5.resource_is_review" || condition_id == "P7.resource_is_review") {
        return snap.resource_type == "review";
    }
    if (condition_id == "P2.is_author" || condition_id == "P3.is_author") {
        return request.user == snap.owner;
    }
    if (condition_id == "P2.not_submitted" || condition_id == "P3.not_submitted") {
        return !snap.submitted;
    }
    if (condition_id == "P4.submitted") return snap.submitted;
    if (condition_id == "P4.not_author") return request.user != snap.owner;
    if (condition_id == "P4.not_prior_reviewer") {
        return !requester_in(snap.reviewers, request.user);
    }
    if (condition_id == "P4.review_count_lt_3") return snap.review_count < 3;
    if (condition_id == "P4.ungraded") return !snap.graded;
    if (condition_id == "P5.is_creator") return request.user == snap.owner;
    if (condition_id == "P5.ungraded") return !snap.graded;
    if (condition_id == "P6.min_two_reviews") return snap.review_count >= 2;
    if (condition_id == "P6.not_already_graded") return !snap.graded;
    if (condition_id == "P7.is_grade_creator") return request.user == snap.grade_creator;
    if (condition_id == "P7.review_matches_grade") return snap.homework_graded;
    if (condition_id == "P7.not_already_appended") return !snap.already_appended;
    throw std::invalid_argument("unknown condition id: " + condition_id);
}

std::string render_explanation(const Decision& decision, const AccessRequest& request,
                               const StateSnapshot& snap,
                               const ExplanationTemplates& templates) {
    std::string head = decision.verdict == Verdict::Allow ? "ALLOW" : "DENY";
    head += ": Policy ";
    head += decision.policy_label;
    head += " — ";
    if (decision.policy == PolicyId::NoPolicy) {
        std::string clause = templates.raw("NoPolicy.denied");
        if (clause.empty()) clause = "no policy governs this action";
        return head + fill_placeholders(clause, request, snap);
    }
    const std::vector<std::string>& cited =
        decision.verdict == Verdict::Allow ? decision.satisfied : decision.violated;
    if (cited.empty()) {
        // Only P1 has an empty condition list.
        std::string summary = templates.raw(std::string(to_string(decision.policy)) + ".summary");
        if (summary.empty()) summary = "no conditions apply";
        return head + fill_placeholders(summary, request, snap);
    }
    std::string body;
    for (std::size_t i = 0; i < cited.size(); ++i) {
        if (i > 0) body += "; ";
        body += templates.clause(cited[i], decision.verdict == Verdict::Allow, request, snap);
    }
    return head + body;
}

Decision decide(const StateSnapshot& snap, const AccessRequest& request,
                const ExplanationTemplates& templates) {
    Decision decision;
    decision.policy = policy_for(request.action);
    decision.policy_label = to_string(decision.policy);
    for (const std::string& condition_id : policy_conditions(request.action)) {
        if (eval_condition(condition_id, snap, request)) {
            decision.satisfied.push_back(condition_id);
        } else {
            decision.violated.push_back(condition_id);
        }
    }
    decision.verdict = decision.violated.empty() ? Verdict::Allow : Verdict::Deny;
    decision.explanation = render_explanation(decision, request, snap, templates);
    return decision;
}

Decision decide(const WorldState& state, const AccessRequest& request,
                const ExplanationTemplates& templates) {
    if (!state.has_user(request.user)) {
        throw NotFoundError("unknown user: " + request.user);
    }
    if (request.action == ActionKind::UploadHomework) {
        if (state.has_resource(request.resource)) {
            throw std::invalid_argument("upload target id already exists: " + request.resource);
        }
        return decide(upload_snapshot(request.resource, request.user), request, templates);
    }
    return decide(snapshot(state, request.resource, request.user), request, templates);
}

} // namespace aclab
