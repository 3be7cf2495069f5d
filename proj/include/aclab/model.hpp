#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "aclab/action.hpp"
#include "aclab/errors.hpp"

namespace aclab {

// Identifiers are opaque strings. Generated data follows the patterns
// u<int>, hw<int>, v<int>, rv<int>, gr<int>; the engine never parses them.
using UserId = std::string;
using ResourceId = std::string;
using VersionId = std::string;
using ReviewId = std::string;
using GradeId = std::string;

struct AccessRequest {
    std::string request_id;
    UserId user;
    ActionKind action = ActionKind::UploadHomework;
    ResourceId resource;
    std::string timestamp; // ISO-8601 UTC, e.g. 2025-01-01T00:00:00Z

    bool operator==(const AccessRequest&) const = default;
};

struct HomeworkVersion {
    VersionId id;
    UserId uploader;
    std::string at;

    bool operator==(const HomeworkVersion&) const = default;
};

struct Homework {
    ResourceId id;
    UserId author;
    std::vector<HomeworkVersion> versions; // length >= 1, oldest first
    bool submitted = false;
    std::optional<std::string> submitted_at; // present iff submitted

    bool operator==(const Homework&) const = default;
};

struct Review {
    ReviewId id;
    ResourceId homework;
    UserId creator;
    std::string created_at;
    int revision_count = 0;
    std::optional<GradeId> appended_to;

    bool operator==(const Review&) const = default;
};

struct Grade {
    GradeId id;
    ResourceId homework;
    UserId creator;
    std::string created_at;
    std::set<ReviewId> appended_reviews;

    bool operator==(const Grade&) const = default;
};

struct IdCounters {
    std::int64_t next_homework = 1;
    std::int64_t next_version = 1;
    std::int64_t next_review = 1;
    std::int64_t next_grade = 1;

    bool operator==(const IdCounters&) const = default;
};

// Full provenance state. The two index maps are derived views maintained
// by apply_effect; recompute_indexes() rebuilds them from the primary maps
// (index order is creation order, recovered by sorting on (created_at, id)).
struct WorldState {
    std::set<UserId> users;
    std::map<ResourceId, Homework> homeworks;
    std::map<ReviewId, Review> reviews;
    std::map<GradeId, Grade> grades;
    std::map<ResourceId, std::vector<ReviewId>> reviews_by_homework;
    std::map<ResourceId, GradeId> grade_by_homework;
    IdCounters counters;

    bool operator==(const WorldState&) const = default;

    bool has_user(const UserId& user) const { return users.count(user) > 0; }
    bool has_resource(const ResourceId& id) const;

    int review_count(const ResourceId& homework) const;
    bool graded(const ResourceId& homework) const;
    std::vector<UserId> reviewers_of(const ResourceId& homework) const;

    // Next fresh id of each kind, without consuming it. apply_effect mints
    // the same value.
    std::string peek_homework_id() const;
    std::string peek_review_id() const;
    std::string peek_grade_id() const;

    void recompute_indexes();
};

// Builds a state with users u1..uN and no resources. id_seed offsets the
// minted-resource counters so independently built worlds do not collide.
// user_count must be >= 1.
WorldState new_world(int user_count, std::int64_t id_seed);

// Flattened, serialization-ready view of one resource as seen by one
// requester. All fields are always present so the record schema is
// uniform across resource types; fields that do not apply hold their
// zero value. For reviews and grades the homework-derived fields
// (submitted, review_count, reviewers, version_count, ...) describe the
// owning homework.
struct StateSnapshot {
    ResourceId resource_id;
    std::string resource_type; // "homework" | "review" | "grade"
    UserId owner;              // author (homework) or creator (review/grade)
    ResourceId homework_id;    // owning homework; the resource itself for homework
    bool submitted = false;
    bool graded = false;
    int review_count = 0;
    std::vector<UserId> reviewers; // creation order
    int version_count = 0;
    bool requester_is_author = false;
    bool requester_has_reviewed = false;
    bool homework_graded = false;
    UserId grade_creator;      // creator of the homework's grade, "" if ungraded
    bool already_appended = false;              // review only
    std::vector<ReviewId> appended_review_ids;  // grade only, sorted

    bool operator==(const StateSnapshot&) const = default;
};

// Pure projection of an existing resource. Throws NotFoundError when the
// resource does not resolve.
StateSnapshot snapshot(const WorldState& state, const ResourceId& resource,
                       const UserId& requester);

// Snapshot used for upload_homework requests, whose target id does not
// exist yet.
StateSnapshot upload_snapshot(const ResourceId& fresh_id, const UserId& requester);

// Effects mirror the actions; payload ids identify created entities.
struct HomeworkUploaded {
    ResourceId homework;
    VersionId version;
    UserId author;
    bool operator==(const HomeworkUploaded&) const = default;
};
struct VersionReplaced {
    ResourceId homework;
    VersionId version;
    bool operator==(const VersionReplaced&) const = default;
};
struct HomeworkSubmitted {
    ResourceId homework;
    bool operator==(const HomeworkSubmitted&) const = default;
};
struct ReviewCreated {
    ReviewId review;
    ResourceId homework;
    UserId creator;
    bool operator==(const ReviewCreated&) const = default;
};
struct ReviewRevised {
    ReviewId review;
    int new_revision_count = 0;
    bool operator==(const ReviewRevised&) const = default;
};
struct GradeCreated {
    GradeId grade;
    ResourceId homework;
    UserId creator;
    bool operator==(const GradeCreated&) const = default;
};
struct ReviewAppended {
    ReviewId review;
    GradeId grade;
    bool operator==(const ReviewAppended&) const = default;
};

using Effect = std::variant<HomeworkUploaded, VersionReplaced, HomeworkSubmitted,
                            ReviewCreated, ReviewRevised, GradeCreated, ReviewAppended>;

// Applies an allowed request and returns the advanced state plus the
// effect that was applied. The input state is not modified. Re-checks the
// request against the policy oracle: a denied request raises
// PolicyViolationError (see oracle.hpp), unresolvable ids raise
// NotFoundError, and an upload over an existing id raises
// std::invalid_argument.
std::pair<WorldState, Effect> apply_effect(const WorldState& state,
                                           const AccessRequest& request);

} // namespace aclab
