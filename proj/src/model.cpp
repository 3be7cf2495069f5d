#include "aclab/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace aclab {

bool WorldState::has_resource(const ResourceId& id) const {
    return homeworks.count(id) > 0 || reviews.count(id) > 0 || grades.count(id) > 0;
}

int WorldState::review_count(const ResourceId& homework) const {
    auto it = reviews_by_homework.find(homework);
    return it == reviews_by_homework.end() ? 0 : static_cast<int>(it->second.size());
}

bool WorldState::graded(const ResourceId& homework) const {
    return grade_by_homework.count(homework) > 0;
}

std::vector<UserId> WorldState::reviewers_of(const ResourceId& homework) const {
    std::vector<UserId> result;
    auto it = reviews_by_homework.find(homework);
    if (it == reviews_by_homework.end()) return result;
    result.reserve(it->second.size());
    for (const ReviewId& review_id : it->second) {
        result.push_back(reviews.at(review_id).creator);
    }
    return result;
}

std::string WorldState::peek_homework_id() const {
    return "hw" + std::to_string(counters.next_homework);
}
std::string WorldState::peek_review_id() const {
    return "rv" + std::to_string(counters.next_review);
}
std::string WorldState::peek_grade_id() const {
    return "gr" + std::to_string(counters.next_grade);
}

void WorldState::recompute_indexes() {
    reviews_by_homework.clear();
    grade_by_homework.clear();
    std::vector<const Review*> ordered;
    ordered.reserve(reviews.size());
    for (const auto& [id, review] : reviews) ordered.push_back(&review);
    std::sort(ordered.begin(), ordered.end(), [](const Review* a, const Review* b) {
        if (a->created_at != b->created_at) return a->created_at < b->created_at;
        return a->id < b->id;
    });
    for (const Review* review : ordered) {
        reviews_by_homework[review->homework].push_back(review->id);
    }
    for (const auto& [id, grade] : grades) {
        grade_by_homework[grade.homework] = id;
    }
}

WorldState new_world(int user_count, std::int64_t id_seed) {
    if (user_count < 1) throw std::invalid_argument("new_world: user_count must be >= 1");
    WorldState state;
    for (int i = 1; i <= user_count; ++i) {
        state.users.insert("u" + std::to_string(i));
    }
    state.counters.next_homework = id_seed + 1;
    state.counters.next_version = id_seed + 1;
    state.counters.next_review = id_seed + 1;
    state.counters.next_grade = id_seed + 1;
    return state;
}

namespace {

StateSnapshot homework_snapshot(const WorldState& state, const Homework& hw,
                                const UserId& requester) {
    StateSnapshot snap;
    snap.resource_id = hw.id;
    snap.resource_type = "homework";
    snap.owner = hw.author;
    snap.homework_id = hw.id;
    snap.submitted = hw.submitted;
    snap.graded = state.graded(hw.id);
    snap.review_count = state.review_count(hw.id);
    snap.reviewers = state.reviewers_of(hw.id);
    snap.version_count = static_cast<int>(hw.versions.size());
    snap.requester_is_author = requester == hw.author;
    snap.requester_has_reviewed =
        std::find(snap.reviewers.begin(), snap.reviewers.end(), requester) !=
        snap.reviewers.end();
    snap.homework_graded = snap.graded;
    auto grade_it = state.grade_by_homework.find(hw.id);
    if (grade_it != state.grade_by_homework.end()) {
        snap.grade_creator = state.grades.at(grade_it->second).creator;
    }
    return snap;
}

} // namespace

StateSnapshot snapshot(const WorldState& state, const ResourceId& resource,
                       const UserId& requester) {
    if (auto hw_it = state.homeworks.find(resource); hw_it != state.homeworks.end()) {
        return homework_snapshot(state, hw_it->second, requester);
    }
    if (auto rv_it = state.reviews.find(resource); rv_it != state.reviews.end()) {
        const Review& review = rv_it->second;
        const Homework& hw = state.homeworks.at(review.homework);
        StateSnapshot snap = homework_snapshot(state, hw, requester);
        snap.resource_id = review.id;
        snap.resource_type = "review";
        snap.owner = review.creator;
        snap.requester_is_author = requester == review.creator;
        snap.already_appended = review.appended_to.has_value();
        return snap;
    }
    if (auto gr_it = state.grades.find(resource); gr_it != state.grades.end()) {
        const Grade& grade = gr_it->second;
        const Homework& hw = state.homeworks.at(grade.homework);
        StateSnapshot snap = homework_snapshot(state, hw, requester);
        snap.resource_id = grade.id;
        snap.resource_type = "grade";
        snap.owner = grade.creator;
        snap.requester_is_author = requester == grade.creator;
        snap.appended_review_ids.assign(grade.appended_reviews.begin(),
                                        grade.appended_reviews.end());
        return snap;
    }
    throw NotFoundError("unknown resource: " + resource);
}

StateSnapshot upload_snapshot(const ResourceId& fresh_id, const UserId& requester) {
    (void)requester;
    StateSnapshot snap;
    snap.resource_id = fresh_id;
    snap.resource_type = "homework";
    snap.homework_id = fresh_id;
    return snap;
}

} // namespace aclab
