#include <algorithm>
#include <array>
#include <ctime>
#include <set>
#include <stdexcept>

#include "aclab/generator.hpp"
#include "aclab/oracle.hpp"
#include "aclab/rng.hpp"

namespace aclab {

void GeneratorConfig::check() const {
    if (num_records < 1) throw std::invalid_argument("generator: num_records must be >= 1");
    if (num_users < 1) throw std::invalid_argument("generator: num_users must be >= 1");
    if (max_reviews_per_homework < 1 || max_reviews_per_homework > 3) {
        throw std::invalid_argument("generator: max_reviews_per_homework must be in [1, 3]");
    }
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_unit(invalid_request_rate)) {
        throw std::invalid_argument("generator: invalid_request_rate must be in [0, 1]");
    }
    if (!in_unit(per_action_min_share)) {
        throw std::invalid_argument("generator: per_action_min_share must be in [0, 1]");
    }
    if (!in_unit(execute_probability)) {
        throw std::invalid_argument("generator: execute_probability must be in [0, 1]");
    }
    if (7.0 * per_action_min_share > 1.0 + 1e-12) {
        throw std::invalid_argument("generator: 7 * per_action_min_share exceeds 1");
    }
}

const std::vector<std::string>& violation_menu(ActionKind action) {
    // Every condition of the governing policy can be staged as the
    // targeted violation, so the menu is the condition catalog itself.
    return policy_conditions(action);
}

namespace {

// Fewest users for which the targeted violation can be staged cleanly.
int min_users_for(const std::string& condition_id) {
    if (condition_id == "P2.is_author" || condition_id == "P3.is_author") return 2;
    if (condition_id == "P2.resource_is_homework" ||
        condition_id == "P3.resource_is_homework" ||
        condition_id == "P4.resource_is_homework" ||
        condition_id == "P6.resource_is_homework") {
        return 2; // needs an existing review to mistarget
    }
    if (condition_id == "P4.submitted") return 2;
    if (condition_id == "P4.not_prior_reviewer") return 2;
    if (condition_id == "P4.review_count_lt_3") return 5;
    if (condition_id == "P4.ungraded") return 4;
    if (condition_id == "P5.is_creator") return 2;
    if (condition_id == "P5.ungraded") return 3;
    if (condition_id == "P6.not_already_graded") return 3;
    if (condition_id == "P7.is_grade_creator") return 3;
    if (condition_id == "P7.review_matches_grade") return 2;
    if (condition_id == "P7.not_already_appended") return 3;
    return 1;
}

int reviews_needed_for(const std::string& condition_id) {
    if (condition_id == "P4.review_count_lt_3") return 3;
    if (condition_id == "P4.not_prior_reviewer") return 1;
    if (condition_id == "P4.ungraded" || condition_id == "P5.ungraded" ||
        condition_id == "P6.not_already_graded" || condition_id == "P7.is_grade_creator" ||
        condition_id == "P7.not_already_appended") {
        return 2; // a grade requires two reviews first
    }
    return 0;
}

std::string format_timestamp(std::int64_t step) {
    // 2025-01-01T00:00:00Z plus one second per step.
    std::time_t base = 1735689600;
    std::time_t at = base + static_cast<std::time_t>(step);
    std::tm parts{};
    gmtime_r(&at, &parts);
    char buffer[80];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  parts.tm_year + 1900, parts.tm_mon + 1, parts.tm_mday, parts.tm_hour,
                  parts.tm_min, parts.tm_sec);
    return buffer;
}

struct Staged {
    AccessRequest request;
    StateSnapshot snap;
};

class Builder {
  public:
    Builder(const GeneratorConfig& config, Rng& rng)
        : config_(config), rng_(rng), state_(new_world(config.num_users, 0)) {
        users_.assign(state_.users.begin(), state_.users.end());
    }

    WorldState& state() { return state_; }
    std::vector<AccessRequest>& applied() { return applied_; }

    [[noreturn]] void infeasible(ActionKind action, const std::string& why) const {
        throw GenerationError("generate: action " + std::string(to_string(action)) +
                              " cannot be staged (" + why + ")");
    }

    std::string next_timestamp() { return format_timestamp(step_++); }

    const UserId& pick_user() { return users_[rng_.bounded(users_.size())]; }

    UserId pick_user_excluding(const std::set<UserId>& exclude, ActionKind action,
                               const std::string& why) {
        std::vector<UserId> candidates;
        for (const UserId& user : users_) {
            if (exclude.count(user) == 0) candidates.push_back(user);
        }
        if (candidates.empty()) infeasible(action, why);
        return candidates[rng_.bounded(candidates.size())];
    }

    // Applies a builder-internal request that advances the trajectory
    // without emitting a record.
    void apply_silent(const UserId& user, ActionKind action, const ResourceId& resource) {
        AccessRequest request;
        request.request_id = "sys" + std::to_string(++silent_count_);
        request.user = user;
        request.action = action;
        request.resource = resource;
        request.timestamp = next_timestamp();
        auto [next, effect] = apply_effect(state_, request);
        (void)effect;
        state_ = std::move(next);
        applied_.push_back(std::move(request));
    }

    ResourceId build_homework(const UserId& author) {
        ResourceId id = state_.peek_homework_id();
        apply_silent(author, ActionKind::UploadHomework, id);
        return id;
    }

    void submit(const ResourceId& hw) {
        apply_silent(state_.homeworks.at(hw).author, ActionKind::SubmitHomework, hw);
    }

    // Adds one review by an eligible user; hw must be submitted,
    // ungraded, and under quota.
    ReviewId add_review(const ResourceId& hw, ActionKind for_action) {
        const Homework& homework = state_.homeworks.at(hw);
        std::set<UserId> exclude{homework.author};
        for (const UserId& reviewer : state_.reviewers_of(hw)) exclude.insert(reviewer);
        UserId reviewer = pick_user_excluding(exclude, for_action, "no eligible reviewer");
        ReviewId id = state_.peek_review_id();
        apply_silent(reviewer, ActionKind::ReviewHomework, hw);
        return id;
    }

    GradeId grade(const ResourceId& hw) {
        GradeId id = state_.peek_grade_id();
        apply_silent(pick_user(), ActionKind::GradeHomework, hw);
        return id;
    }

    // A submitted, ungraded homework with at least want_reviews reviews
    // and review slots described by under_quota.
    ResourceId staged_homework(ActionKind for_action, int want_reviews, bool want_graded) {
        std::vector<ResourceId> candidates;
        for (const auto& [id, hw] : state_.homeworks) {
            if (!hw.submitted) continue;
            bool graded = state_.graded(id);
            int reviews = state_.review_count(id);
            if (want_graded) {
                if (graded && reviews >= want_reviews) candidates.push_back(id);
            } else {
                if (!graded && reviews >= want_reviews && reviews <= 3) candidates.push_back(id);
            }
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        if (config_.num_users < 2 && want_reviews > 0) {
            infeasible(for_action, "reviews need a non-author reviewer");
        }
        ResourceId hw = build_homework(pick_user());
        submit(hw);
        for (int i = 0; i < want_reviews; ++i) add_review(hw, for_action);
        if (want_graded) {
            while (state_.review_count(hw) < 2) add_review(hw, for_action);
            grade(hw);
        }
        return hw;
    }

    // Some review or grade id, to mistarget homework actions.
    ResourceId any_non_homework(ActionKind for_action) {
        std::vector<ResourceId> candidates;
        for (const auto& [id, review] : state_.reviews) {
            (void)review;
            candidates.push_back(id);
        }
        for (const auto& [id, grade] : state_.grades) {
            (void)grade;
            candidates.push_back(id);
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        ResourceId hw = staged_homework(for_action, 1, false);
        return state_.reviews_by_homework.at(hw).back();
    }

    ResourceId any_homework() {
        std::vector<ResourceId> candidates;
        for (const auto& [id, hw] : state_.homeworks) {
            (void)hw;
            candidates.push_back(id);
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        return build_homework(pick_user());
    }

    // An unsubmitted homework, fresh or existing.
    ResourceId unsubmitted_homework() {
        std::vector<ResourceId> candidates;
        for (const auto& [id, hw] : state_.homeworks) {
            if (!hw.submitted) candidates.push_back(id);
        }
        if (!candidates.empty() && !rng_.bernoulli(0.3)) {
            return candidates[rng_.bounded(candidates.size())];
        }
        return build_homework(pick_user());
    }

    // A review whose homework is ungraded (grade them lazily elsewhere).
    ReviewId ungraded_review(ActionKind for_action) {
        std::vector<ReviewId> candidates;
        for (const auto& [id, review] : state_.reviews) {
            if (!state_.graded(review.homework)) candidates.push_back(id);
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        ResourceId hw = staged_homework(for_action, 1, false);
        return state_.reviews_by_homework.at(hw).back();
    }

    // A review of a graded homework, optionally not yet appended. When no
    // qualifying review exists anywhere, reusing a graded homework cannot
    // help (its reviews may all be appended already), so build a fresh one
    // whose reviews start unappended.
    ReviewId graded_review(ActionKind for_action, bool must_be_unappended) {
        std::vector<ReviewId> candidates;
        for (const auto& [id, review] : state_.reviews) {
            if (!state_.graded(review.homework)) continue;
            if (must_be_unappended && review.appended_to.has_value()) continue;
            candidates.push_back(id);
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        if (config_.num_users < 2) {
            infeasible(for_action, "reviews need a non-author reviewer");
        }
        ResourceId hw = build_homework(pick_user());
        submit(hw);
        while (state_.review_count(hw) < 2) add_review(hw, for_action);
        grade(hw);
        return state_.reviews_by_homework.at(hw).front();
    }

    // A review that has already been appended to its grade.
    ReviewId appended_review(ActionKind for_action) {
        std::vector<ReviewId> candidates;
        for (const auto& [id, review] : state_.reviews) {
            if (review.appended_to.has_value()) candidates.push_back(id);
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        ReviewId review = graded_review(for_action, true);
        const UserId& creator =
            state_.grades.at(state_.grade_by_homework.at(state_.reviews.at(review).homework))
                .creator;
        apply_silent(creator, ActionKind::AppendReviewToGrade, review);
        return review;
    }

  private:
    const GeneratorConfig& config_;
    Rng& rng_;
    WorldState state_;
    std::vector<UserId> users_;
    std::vector<AccessRequest> applied_;
    std::int64_t step_ = 0;
    std::int64_t silent_count_ = 0;
};

class Sampler {
  public:
    Sampler(const GeneratorConfig& config, Rng& rng, Builder& builder)
        : config_(config), rng_(rng), builder_(builder) {}

    Staged stage_legit(ActionKind action) {
        WorldState& state = builder_.state();
        switch (action) {
            case ActionKind::UploadHomework: {
                return finish(builder_.pick_user(), action, state.peek_homework_id());
            }
            case ActionKind::ReplaceHomework:
            case ActionKind::SubmitHomework: {
                ResourceId hw = builder_.unsubmitted_homework();
                return finish(state.homeworks.at(hw).author, action, hw);
            }
            case ActionKind::ReviewHomework: {
                ResourceId hw = pick_reviewable();
                std::set<UserId> exclude{state.homeworks.at(hw).author};
                for (const UserId& reviewer : state.reviewers_of(hw)) exclude.insert(reviewer);
                UserId reviewer =
                    builder_.pick_user_excluding(exclude, action, "no eligible reviewer");
                return finish(reviewer, action, hw);
            }
            case ActionKind::ReviseReview: {
                ReviewId review = builder_.ungraded_review(action);
                return finish(state.reviews.at(review).creator, action, review);
            }
            case ActionKind::GradeHomework: {
                ResourceId hw = pick_gradable();
                return finish(builder_.pick_user(), action, hw);
            }
            case ActionKind::AppendReviewToGrade: {
                ReviewId review = builder_.graded_review(action, true);
                const Review& rv = state.reviews.at(review);
                const UserId& creator =
                    state.grades.at(state.grade_by_homework.at(rv.homework)).creator;
                return finish(creator, action, review);
            }
        }
        throw std::logic_error("unreachable ActionKind");
    }

    Staged stage_adversarial(ActionKind action, const std::string& target) {
        WorldState& state = builder_.state();
        if (target == "P2.resource_is_homework" || target == "P3.resource_is_homework" ||
            target == "P4.resource_is_homework" || target == "P6.resource_is_homework") {
            return finish(builder_.pick_user(), action, builder_.any_non_homework(action));
        }
        if (target == "P5.resource_is_review" || target == "P7.resource_is_review") {
            return finish(builder_.pick_user(), action, builder_.any_homework());
        }
        if (target == "P2.is_author" || target == "P3.is_author") {
            ResourceId hw = builder_.unsubmitted_homework();
            UserId outsider = builder_.pick_user_excluding({state.homeworks.at(hw).author},
                                                           action, "needs a non-author");
            return finish(outsider, action, hw);
        }
        if (target == "P2.not_submitted" || target == "P3.not_submitted") {
            ResourceId hw = submitted_ungraded(0);
            return finish(state.homeworks.at(hw).author, action, hw);
        }
        if (target == "P4.submitted") {
            ResourceId hw = builder_.unsubmitted_homework();
            UserId outsider = builder_.pick_user_excluding({state.homeworks.at(hw).author},
                                                           action, "needs a non-author");
            return finish(outsider, action, hw);
        }
        if (target == "P4.not_author") {
            ResourceId hw = submitted_ungraded(0);
            return finish(state.homeworks.at(hw).author, action, hw);
        }
        if (target == "P4.not_prior_reviewer") {
            ResourceId hw = submitted_ungraded(1);
            const std::vector<UserId> reviewers = state.reviewers_of(hw);
            return finish(reviewers[rng_.bounded(reviewers.size())], action, hw);
        }
        if (target == "P4.review_count_lt_3") {
            ResourceId hw = full_quota_homework();
            std::set<UserId> exclude{state.homeworks.at(hw).author};
            for (const UserId& reviewer : state.reviewers_of(hw)) exclude.insert(reviewer);
            UserId outsider =
                builder_.pick_user_excluding(exclude, action, "needs a fourth reviewer");
            return finish(outsider, action, hw);
        }
        if (target == "P4.ungraded" || target == "P6.not_already_graded") {
            ResourceId hw = graded_homework();
            std::set<UserId> exclude{state.homeworks.at(hw).author};
            for (const UserId& reviewer : state.reviewers_of(hw)) exclude.insert(reviewer);
            UserId requester = target == "P4.ungraded"
                                   ? builder_.pick_user_excluding(exclude, action,
                                                                  "needs an outside reviewer")
                                   : builder_.pick_user();
            return finish(requester, action, hw);
        }
        if (target == "P5.is_creator") {
            ReviewId review = builder_.ungraded_review(action);
            UserId outsider = builder_.pick_user_excluding({state.reviews.at(review).creator},
                                                           action, "needs a non-creator");
            return finish(outsider, action, review);
        }
        if (target == "P5.ungraded") {
            ReviewId review = builder_.graded_review(action, false);
            return finish(state.reviews.at(review).creator, action, review);
        }
        if (target == "P6.min_two_reviews") {
            ResourceId hw = submitted_ungraded(0);
            if (state.review_count(hw) >= 2) hw = builder_.build_homework(builder_.pick_user());
            return finish(builder_.pick_user(), action, hw);
        }
        if (target == "P7.is_grade_creator") {
            ReviewId review = builder_.graded_review(action, true);
            const Review& rv = state.reviews.at(review);
            const UserId& creator =
                state.grades.at(state.grade_by_homework.at(rv.homework)).creator;
            UserId outsider = builder_.pick_user_excluding({creator}, action,
                                                           "needs a non-grade-creator");
            return finish(outsider, action, review);
        }
        if (target == "P7.review_matches_grade") {
            ReviewId review = builder_.ungraded_review(action);
            return finish(builder_.pick_user(), action, review);
        }
        if (target == "P7.not_already_appended") {
            ReviewId review = builder_.appended_review(action);
            const Review& rv = state.reviews.at(review);
            const UserId& creator =
                state.grades.at(state.grade_by_homework.at(rv.homework)).creator;
            return finish(creator, action, review);
        }
        throw std::logic_error("no staging for condition " + target);
    }

  private:
    const GeneratorConfig& config_;
    Rng& rng_;
    Builder& builder_;

    Staged finish(UserId user, ActionKind action, ResourceId resource) {
        Staged staged;
        staged.request.user = std::move(user);
        staged.request.action = action;
        staged.request.resource = std::move(resource);
        staged.request.timestamp = builder_.next_timestamp();
        staged.snap = action == ActionKind::UploadHomework
                          ? upload_snapshot(staged.request.resource, staged.request.user)
                          : snapshot(builder_.state(), staged.request.resource,
                                     staged.request.user);
        return staged;
    }

    // Submitted, ungraded, at least want_reviews reviews.
    ResourceId submitted_ungraded(int want_reviews) {
        return builder_.staged_homework(ActionKind::ReviewHomework, want_reviews, false);
    }

    ResourceId graded_homework() {
        return builder_.staged_homework(ActionKind::GradeHomework, 2, true);
    }

    ResourceId full_quota_homework() {
        WorldState& state = builder_.state();
        std::vector<ResourceId> candidates;
        for (const auto& [id, hw] : state.homeworks) {
            if (hw.submitted && !state.graded(id) && state.review_count(id) >= 3) {
                candidates.push_back(id);
            }
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        ResourceId hw = builder_.staged_homework(ActionKind::ReviewHomework, 0, false);
        while (state.review_count(hw) < 3) {
            builder_.add_review(hw, ActionKind::ReviewHomework);
        }
        return hw;
    }

    // Submitted homework with review slots open for a legitimate review.
    ResourceId pick_reviewable() {
        WorldState& state = builder_.state();
        std::vector<ResourceId> candidates;
        for (const auto& [id, hw] : state.homeworks) {
            if (!hw.submitted || state.graded(id)) continue;
            int reviews = state.review_count(id);
            if (reviews >= config_.max_reviews_per_homework) continue;
            std::set<UserId> taken{hw.author};
            for (const UserId& reviewer : state.reviewers_of(id)) taken.insert(reviewer);
            if (taken.size() < state.users.size()) candidates.push_back(id);
        }
        if (!candidates.empty() && !rng_.bernoulli(0.3)) {
            return candidates[rng_.bounded(candidates.size())];
        }
        if (config_.num_users < 2) {
            builder_.infeasible(ActionKind::ReviewHomework, "reviews need a non-author");
        }
        ResourceId hw = builder_.build_homework(builder_.pick_user());
        builder_.submit(hw);
        return hw;
    }

    ResourceId pick_gradable() {
        WorldState& state = builder_.state();
        std::vector<ResourceId> candidates;
        for (const auto& [id, hw] : state.homeworks) {
            if (hw.submitted && !state.graded(id) && state.review_count(id) >= 2) {
                candidates.push_back(id);
            }
        }
        if (!candidates.empty()) return candidates[rng_.bounded(candidates.size())];
        return builder_.staged_homework(ActionKind::GradeHomework, 2, false);
    }
};

} // namespace

GeneratorResult generate(const GeneratorConfig& config) {
    config.check();
    Rng rng(mix64(config.seed));
    Builder builder(config, rng);
    Sampler sampler(config, rng, builder);

    GeneratorResult result;
    result.records.reserve(config.num_records);
    std::map<ActionKind, int> emitted;
    for (ActionKind action : kAllActions) emitted[action] = 0;

    for (int k = 1; k <= config.num_records; ++k) {
        ActionKind action = kAllActions[0];
        for (ActionKind candidate : kAllActions) {
            if (emitted[candidate] < emitted[action]) action = candidate;
        }

        std::vector<std::string> menu;
        for (const std::string& condition : violation_menu(action)) {
            if (config.num_users >= min_users_for(condition) &&
                config.max_reviews_per_homework >= reviews_needed_for(condition)) {
                menu.push_back(condition);
            }
        }

        Staged staged;
        bool adversarial = !menu.empty() && rng.bernoulli(config.invalid_request_rate);
        std::string target;
        if (adversarial) {
            target = menu[rng.bounded(menu.size())];
            staged = sampler.stage_adversarial(action, target);
        } else {
            staged = sampler.stage_legit(action);
        }
        staged.request.request_id = "rec" + std::to_string(k);

        Decision decision = decide(staged.snap, staged.request);
        if (adversarial) {
            bool hit = std::find(decision.violated.begin(), decision.violated.end(), target) !=
                       decision.violated.end();
            if (decision.verdict != Verdict::Deny || !hit) {
                throw std::logic_error("generator staging bug: " + target +
                                       " not violated as targeted");
            }
        } else if (decision.verdict != Verdict::Allow) {
            throw std::logic_error("generator staging bug: legitimate sample denied: " +
                                   decision.explanation);
        }

        DatasetRecord record;
        record.id = "rec" + std::to_string(k);
        record.request = staged.request;
        record.state = staged.snap;
        record.decision = decision.verdict;
        record.policy_id = decision.policy_label;
        record.explanation = decision.explanation;
        result.records.push_back(std::move(record));
        ++emitted[action];

        if (decision.verdict == Verdict::Allow && rng.bernoulli(config.execute_probability)) {
            auto [next, effect] = apply_effect(builder.state(), staged.request);
            (void)effect;
            builder.state() = std::move(next);
            builder.applied().push_back(staged.request);
        }
    }

    for (ActionKind action : kAllActions) {
        double share = static_cast<double>(emitted[action]);
        if (share + 1e-9 < config.per_action_min_share * config.num_records) {
            throw GenerationError("generate: action " + std::string(to_string(action)) +
                                  " missed its minimum share");
        }
    }

    result.applied_requests = builder.applied();
    result.final_state = builder.state();
    return result;
}

} // namespace aclab
