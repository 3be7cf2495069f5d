#include <doctest.h>

#include <set>

#include "aclab/errors.hpp"
#include "aclab/model.hpp"
#include "aclab/oracle.hpp"
#include "aclab/rng.hpp"

using namespace aclab;

namespace {

AccessRequest make_request(const std::string& user, ActionKind action,
                           const std::string& resource) {
    AccessRequest request;
    request.request_id = "t";
    request.user = user;
    request.action = action;
    request.resource = resource;
    request.timestamp = "2025-01-01T00:00:00Z";
    return request;
}

WorldState apply(const WorldState& state, const std::string& user, ActionKind action,
                 const std::string& resource) {
    return apply_effect(state, make_request(user, action, resource)).first;
}

// Small staged world: hw1 by u1, submitted, reviewed by u2 and u3,
// graded by u4.
WorldState staged_world() {
    WorldState state = new_world(4, 0);
    state = apply(state, "u1", ActionKind::UploadHomework, "hw1");
    state = apply(state, "u1", ActionKind::SubmitHomework, "hw1");
    state = apply(state, "u2", ActionKind::ReviewHomework, "hw1");
    state = apply(state, "u3", ActionKind::ReviewHomework, "hw1");
    state = apply(state, "u4", ActionKind::GradeHomework, "hw1");
    return state;
}

} // namespace

TEST_CASE("action names round-trip the seven snake_case strings") {
    CHECK(kAllActions.size() == 7);
    std::set<std::string> seen;
    for (ActionKind action : kAllActions) {
        std::string name(to_string(action));
        CHECK(action_from_string(name) == action);
        seen.insert(name);
    }
    CHECK(seen.size() == 7);
    CHECK(seen.count("upload_homework") == 1);
    CHECK(seen.count("append_review_to_grade") == 1);
    CHECK_FALSE(action_from_string("drop_course").has_value());
}

TEST_CASE("new_world builds u1..uN with no resources") {
    WorldState state = new_world(3, 7);
    CHECK(state.users == std::set<UserId>{"u1", "u2", "u3"});
    CHECK(state.homeworks.empty());
    CHECK(state.reviews.empty());
    CHECK(state.grades.empty());

    CHECK(new_world(1, 0).users == std::set<UserId>{"u1"});
    CHECK(new_world(10, 42) == new_world(10, 42));
    CHECK_THROWS_AS(new_world(0, 0), std::invalid_argument);
}

TEST_CASE("upload creates a homework with one version by the author") {
    WorldState state = new_world(2, 0);
    auto [next, effect] = apply_effect(state, make_request("u1", ActionKind::UploadHomework,
                                                           state.peek_homework_id()));
    CHECK(state.homeworks.empty()); // input state untouched
    REQUIRE(next.homeworks.count("hw1") == 1);
    const Homework& hw = next.homeworks.at("hw1");
    CHECK(hw.author == "u1");
    CHECK(hw.versions.size() == 1);
    CHECK(hw.versions[0].uploader == "u1");
    CHECK_FALSE(hw.submitted);
    CHECK_FALSE(hw.submitted_at.has_value());
    CHECK(std::holds_alternative<HomeworkUploaded>(effect));
}

TEST_CASE("replace appends a version; submit freezes the list") {
    WorldState state = new_world(2, 0);
    state = apply(state, "u1", ActionKind::UploadHomework, "hw1");
    state = apply(state, "u1", ActionKind::ReplaceHomework, "hw1");
    CHECK(state.homeworks.at("hw1").versions.size() == 2);

    state = apply(state, "u1", ActionKind::SubmitHomework, "hw1");
    CHECK(state.homeworks.at("hw1").submitted);
    CHECK(state.homeworks.at("hw1").submitted_at.has_value());

    CHECK_THROWS_AS(apply(state, "u1", ActionKind::ReplaceHomework, "hw1"),
                    PolicyViolationError);
    try {
        apply(state, "u1", ActionKind::ReplaceHomework, "hw1");
    } catch (const PolicyViolationError& error) {
        CHECK(error.decision.policy_label == "P2");
        CHECK(error.decision.verdict == Verdict::Deny);
    }
}

TEST_CASE("grade after two reviews creates gr1 with the grader as creator") {
    WorldState state = staged_world();
    REQUIRE(state.grades.count("gr1") == 1);
    CHECK(state.grades.at("gr1").creator == "u4");
    CHECK(state.grades.at("gr1").homework == "hw1");
    CHECK(state.graded("hw1"));
}

TEST_CASE("review and append maintain cross-references") {
    WorldState state = staged_world();
    CHECK(state.review_count("hw1") == 2);
    CHECK(state.reviewers_of("hw1") == std::vector<UserId>{"u2", "u3"});

    state = apply(state, "u4", ActionKind::AppendReviewToGrade, "rv1");
    CHECK(state.reviews.at("rv1").appended_to == GradeId{"gr1"});
    CHECK(state.grades.at("gr1").appended_reviews == std::set<ReviewId>{"rv1"});

    // Re-appending the same review is a policy violation.
    CHECK_THROWS_AS(apply(state, "u4", ActionKind::AppendReviewToGrade, "rv1"),
                    PolicyViolationError);
}

TEST_CASE("revise increments revision_count only") {
    WorldState state = new_world(3, 0);
    state = apply(state, "u1", ActionKind::UploadHomework, "hw1");
    state = apply(state, "u1", ActionKind::SubmitHomework, "hw1");
    state = apply(state, "u2", ActionKind::ReviewHomework, "hw1");
    CHECK(state.reviews.at("rv1").revision_count == 0);
    state = apply(state, "u2", ActionKind::ReviseReview, "rv1");
    CHECK(state.reviews.at("rv1").revision_count == 1);
}

TEST_CASE("apply_effect errors: denied request, unknown ids") {
    WorldState state = new_world(2, 0);
    state = apply(state, "u1", ActionKind::UploadHomework, "hw1");
    state = apply(state, "u1", ActionKind::SubmitHomework, "hw1");

    CHECK_THROWS_AS(apply(state, "u1", ActionKind::ReplaceHomework, "hw1"),
                    PolicyViolationError);
    CHECK_THROWS_AS(apply(state, "u9", ActionKind::SubmitHomework, "hw1"), NotFoundError);
    CHECK_THROWS_AS(apply(state, "u1", ActionKind::SubmitHomework, "hw9"), NotFoundError);
}

TEST_CASE("post-hoc invariants hold on states built via apply_effect") {
    WorldState state = staged_world();
    for (const auto& [id, hw] : state.homeworks) {
        (void)id;
        for (const HomeworkVersion& version : hw.versions) {
            CHECK(version.uploader == hw.author);
        }
        CHECK(hw.submitted == hw.submitted_at.has_value());
    }
    for (const auto& [id, review] : state.reviews) {
        (void)id;
        REQUIRE(state.homeworks.count(review.homework) == 1);
        CHECK(review.creator != state.homeworks.at(review.homework).author);
    }
    for (const auto& [id, grade] : state.grades) {
        for (const ReviewId& review : grade.appended_reviews) {
            CHECK(state.reviews.at(review).homework == grade.homework);
        }
        CHECK(state.grade_by_homework.at(grade.homework) == id);
    }
}

TEST_CASE("index recomputation matches the maintained indexes") {
    WorldState state = staged_world();
    WorldState copy = state;
    copy.reviews_by_homework.clear();
    copy.grade_by_homework.clear();
    copy.recompute_indexes();
    CHECK(copy.reviews_by_homework == state.reviews_by_homework);
    CHECK(copy.grade_by_homework == state.grade_by_homework);
}

TEST_CASE("replaying the same requests gives structurally equal states") {
    CHECK(staged_world() == staged_world());
}

TEST_CASE("snapshot flattens homework state") {
    WorldState state = new_world(10, 0);
    state = apply(state, "u1", ActionKind::UploadHomework, "hw1");
    state = apply(state, "u1", ActionKind::SubmitHomework, "hw1");
    state = apply(state, "u5", ActionKind::ReviewHomework, "hw1");
    state = apply(state, "u9", ActionKind::ReviewHomework, "hw1");

    StateSnapshot snap = snapshot(state, "hw1", "u5");
    CHECK(snap.resource_type == "homework");
    CHECK(snap.submitted);
    CHECK_FALSE(snap.graded);
    CHECK(snap.review_count == 2);
    CHECK(snap.reviewers == std::vector<UserId>{"u5", "u9"});
    CHECK(snap.requester_has_reviewed);
    CHECK_FALSE(snap.requester_is_author);
    CHECK(snap.owner == "u1");

    // Pure: repeated calls are equal.
    CHECK(snapshot(state, "hw1", "u5") == snap);
    CHECK_THROWS_AS(snapshot(state, "nope", "u1"), NotFoundError);
}

TEST_CASE("snapshot of a fresh homework for its author") {
    WorldState state = new_world(2, 0);
    state = apply(state, "u2", ActionKind::UploadHomework, "hw1");
    StateSnapshot snap = snapshot(state, "hw1", "u2");
    CHECK_FALSE(snap.submitted);
    CHECK(snap.review_count == 0);
    CHECK(snap.requester_is_author);
    CHECK(snap.version_count == 1);
}

TEST_CASE("snapshot of a review reflects the owning homework's grade") {
    WorldState state = staged_world();
    StateSnapshot snap = snapshot(state, "rv1", "u2");
    CHECK(snap.resource_type == "review");
    CHECK(snap.owner == "u2");
    CHECK(snap.homework_graded);
    CHECK(snap.grade_creator == "u4");
    CHECK_FALSE(snap.already_appended);
    CHECK(snap.requester_is_author); // requester is the review creator

    StateSnapshot grade_snap = snapshot(state, "gr1", "u4");
    CHECK(grade_snap.resource_type == "grade");
    CHECK(grade_snap.owner == "u4");
    CHECK(grade_snap.appended_review_ids.empty());
}

TEST_CASE("id minting skips ids already present") {
    WorldState state = new_world(2, 0);
    state = apply(state, "u1", ActionKind::UploadHomework, "hw1");
    CHECK(state.peek_homework_id() == "hw2");
    // Hand-inject hw2 to force a collision bump.
    Homework hw = state.homeworks.at("hw1");
    hw.id = "hw2";
    state.homeworks["hw2"] = hw;
    state.recompute_indexes();
    state = apply(state, "u2", ActionKind::UploadHomework, "hwx");
    CHECK(state.peek_homework_id() == "hw3");
    state = apply(state, "u2", ActionKind::UploadHomework, state.peek_homework_id());
    CHECK(state.homeworks.count("hw3") == 1);
}

TEST_CASE("rng primitives are deterministic and in range") {
    Rng a(12345);
    Rng b(12345);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(1);
    for (int i = 0; i < 1000; ++i) {
        double unit = c.next_unit();
        CHECK(unit >= 0.0);
        CHECK(unit < 1.0);
        CHECK(c.bounded(7) < 7);
    }
    CHECK(stable_hash("alpha") == stable_hash("alpha"));
    CHECK(stable_hash("alpha") != stable_hash("beta"));
    CHECK(keyed_unit(9, "rec1") == keyed_unit(9, "rec1"));
    CHECK(keyed_unit(9, "rec1") != keyed_unit(9, "rec2"));
}

TEST_CASE("rng bounded covers all residues roughly uniformly") {
    Rng rng(77);
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < 7000; ++i) ++counts[rng.bounded(7)];
    REQUIRE(counts.size() == 7);
    for (const auto& [value, count] : counts) {
        (void)value;
        CHECK(count > 700);
    }
}
