#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aclab/dataset.hpp"
#include "aclab/model.hpp"

namespace aclab {

struct GeneratorConfig {
    std::uint64_t seed = 1;
    int num_records = 10000;
    int num_users = 30;
    int max_reviews_per_homework = 3;
    double invalid_request_rate = 0.5;
    double per_action_min_share = 0.10;
    double execute_probability = 0.9;

    // Throws std::invalid_argument when a field is out of range or the
    // share budget is infeasible (7 * per_action_min_share > 1).
    void check() const;
};

struct GeneratorResult {
    std::vector<DatasetRecord> records;
    // Every request applied to the builder state, in application order.
    // Replaying them from new_world(num_users, 0) must succeed; the
    // trajectory-legality test does exactly that.
    std::vector<AccessRequest> applied_requests;
    WorldState final_state;
};

// Simulates classroom trajectories and samples one labeled request per
// record: a balancing controller keeps per-action counts near-equal,
// adversarial variants are drawn from a per-action violation menu so
// every condition id occurs as a violation cause, and allowed requests
// advance the world with probability execute_probability. Deterministic
// for a fixed config. Throws GenerationError when an action cannot be
// staged (for example review flows with a single user).
GeneratorResult generate(const GeneratorConfig& config);

// Violation menu entries for one action: condition ids an adversarial
// sample can target. Exposed for the coverage tests.
const std::vector<std::string>& violation_menu(ActionKind action);

} // namespace aclab
