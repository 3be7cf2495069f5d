#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace aclab {

// The seven workflow actions. Serialized names are the snake_case strings
// returned by to_string(); they are part of the dataset wire format.
enum class ActionKind {
    UploadHomework,
    ReplaceHomework,
    SubmitHomework,
    ReviewHomework,
    ReviseReview,
    GradeHomework,
    AppendReviewToGrade,
};

inline constexpr std::array<ActionKind, 7> kAllActions = {
    ActionKind::UploadHomework,   ActionKind::ReplaceHomework,
    ActionKind::SubmitHomework,   ActionKind::ReviewHomework,
    ActionKind::ReviseReview,     ActionKind::GradeHomework,
    ActionKind::AppendReviewToGrade,
};

std::string_view to_string(ActionKind action);
std::optional<ActionKind> action_from_string(std::string_view name);

// Policy identifiers. Each action is governed by exactly one policy;
// NoPolicy marks decisions made outside the seven workflow policies
// (deny-by-default and the RBAC/DAC baseline engines).
enum class PolicyId { P1, P2, P3, P4, P5, P6, P7, NoPolicy };

std::string_view to_string(PolicyId policy);
PolicyId policy_for(ActionKind action);

// The entity kind an action's target resource must resolve to.
// upload_homework targets a fresh homework id that does not exist yet.
enum class ResourceType { Homework, Review, Grade };

std::string_view to_string(ResourceType type);
ResourceType resource_type_for(ActionKind action);

} // namespace aclab
