#include "aclab/action.hpp"

#include <stdexcept>

namespace aclab {

std::string_view to_string(ActionKind action) {
    switch (action) {
        case ActionKind::UploadHomework: return "upload_homework";
        case ActionKind::ReplaceHomework: return "replace_homework";
        case ActionKind::SubmitHomework: return "submit_homework";
        case ActionKind::ReviewHomework: return "review_homework";
        case ActionKind::ReviseReview: return "revise_review";
        case ActionKind::GradeHomework: return "grade_homework";
        case ActionKind::AppendReviewToGrade: return "append_review_to_grade";
    }
    throw std::logic_error("unreachable ActionKind");
}

std::optional<ActionKind> action_from_string(std::string_view name) {
    for (ActionKind action : kAllActions) {
        if (name == to_string(action)) return action;
    }
    return std::nullopt;
}

std::string_view to_string(PolicyId policy) {
    switch (policy) {
        case PolicyId::P1: return "P1";
        case PolicyId::P2: return "P2";
        case PolicyId::P3: return "P3";
        case PolicyId::P4: return "P4";
        case PolicyId::P5: return "P5";
        case PolicyId::P6: return "P6";
        case PolicyId::P7: return "P7";
        case PolicyId::NoPolicy: return "none";
    }
    throw std::logic_error("unreachable PolicyId");
}

PolicyId policy_for(ActionKind action) {
    switch (action) {
        case ActionKind::UploadHomework: return PolicyId::P1;
        case ActionKind::ReplaceHomework: return PolicyId::P2;
        case ActionKind::SubmitHomework: return PolicyId::P3;
        case ActionKind::ReviewHomework: return PolicyId::P4;
        case ActionKind::ReviseReview: return PolicyId::P5;
        case ActionKind::GradeHomework: return PolicyId::P6;
        case ActionKind::AppendReviewToGrade: return PolicyId::P7;
    }
    throw std::logic_error("unreachable ActionKind");
}

std::string_view to_string(ResourceType type) {
    switch (type) {
        case ResourceType::Homework: return "homework";
        case ResourceType::Review: return "review";
        case ResourceType::Grade: return "grade";
    }
    throw std::logic_error("unreachable ResourceType");
}

ResourceType resource_type_for(ActionKind action) {
    switch (action) {
        case ActionKind::UploadHomework:
        case ActionKind::ReplaceHomework:
        case ActionKind::SubmitHomework:
        case ActionKind::ReviewHomework:
        case ActionKind::GradeHomework:
            return ResourceType::Homework;
        case ActionKind::ReviseReview:
        case ActionKind::AppendReviewToGrade:
            return ResourceType::Review;
    }
    throw std::logic_error("unreachable ActionKind");
}

} // namespace aclab
