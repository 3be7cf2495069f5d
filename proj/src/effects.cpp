#include <stdexcept>

#include "aclab/model.hpp"
#include "aclab/oracle.hpp"

namespace aclab {

namespace {

std::string mint_version_id(IdCounters& counters) {
    return "v" + std::to_string(counters.next_version++);
}

std::string mint_review_id(WorldState& state) {
    while (state.has_resource(state.peek_review_id())) ++state.counters.next_review;
    std::string id = state.peek_review_id();
    ++state.counters.next_review;
    return id;
}

std::string mint_grade_id(WorldState& state) {
    while (state.has_resource(state.peek_grade_id())) ++state.counters.next_grade;
    std::string id = state.peek_grade_id();
    ++state.counters.next_grade;
    return id;
}

} // namespace

std::pair<WorldState, Effect> apply_effect(const WorldState& state,
                                           const AccessRequest& request) {
    Decision decision = decide(state, request);
    if (decision.verdict != Verdict::Allow) {
        throw PolicyViolationError(std::move(decision));
    }

    WorldState next = state;
    switch (request.action) {
        case ActionKind::UploadHomework: {
            Homework hw;
            hw.id = request.resource;
            hw.author = request.user;
            HomeworkVersion version{mint_version_id(next.counters), request.user,
                                    request.timestamp};
            hw.versions.push_back(version);
            next.homeworks.emplace(hw.id, std::move(hw));
            while (next.has_resource(next.peek_homework_id())) {
                ++next.counters.next_homework;
            }
            return {std::move(next),
                    HomeworkUploaded{request.resource, version.id, request.user}};
        }
        case ActionKind::ReplaceHomework: {
            Homework& hw = next.homeworks.at(request.resource);
            HomeworkVersion version{mint_version_id(next.counters), request.user,
                                    request.timestamp};
            hw.versions.push_back(version);
            return {std::move(next), VersionReplaced{request.resource, version.id}};
        }
        case ActionKind::SubmitHomework: {
            Homework& hw = next.homeworks.at(request.resource);
            hw.submitted = true;
            hw.submitted_at = request.timestamp;
            return {std::move(next), HomeworkSubmitted{request.resource}};
        }
        case ActionKind::ReviewHomework: {
            Review review;
            review.id = mint_review_id(next);
            review.homework = request.resource;
            review.creator = request.user;
            review.created_at = request.timestamp;
            next.reviews_by_homework[request.resource].push_back(review.id);
            ReviewCreated effect{review.id, request.resource, request.user};
            next.reviews.emplace(review.id, std::move(review));
            return {std::move(next), effect};
        }
        case ActionKind::ReviseReview: {
            Review& review = next.reviews.at(request.resource);
            ++review.revision_count;
            return {std::move(next), ReviewRevised{request.resource, review.revision_count}};
        }
        case ActionKind::GradeHomework: {
            Grade grade;
            grade.id = mint_grade_id(next);
            grade.homework = request.resource;
            grade.creator = request.user;
            grade.created_at = request.timestamp;
            next.grade_by_homework[request.resource] = grade.id;
            GradeCreated effect{grade.id, request.resource, request.user};
            next.grades.emplace(grade.id, std::move(grade));
            return {std::move(next), effect};
        }
        case ActionKind::AppendReviewToGrade: {
            Review& review = next.reviews.at(request.resource);
            const GradeId& grade_id = next.grade_by_homework.at(review.homework);
            Grade& grade = next.grades.at(grade_id);
            review.appended_to = grade_id;
            grade.appended_reviews.insert(review.id);
            return {std::move(next), ReviewAppended{request.resource, grade_id}};
        }
    }
    throw std::logic_error("unreachable ActionKind");
}

} // namespace aclab
