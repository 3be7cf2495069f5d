#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "aclab/dataset.hpp"
#include "aclab/oracle.hpp"
#include "aclab/rng.hpp"

namespace aclab {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json request_to_json(const AccessRequest& request) {
    ordered_json out;
    out["user_id"] = request.user;
    out["action"] = std::string(to_string(request.action));
    out["resource_id"] = request.resource;
    out["timestamp"] = request.timestamp;
    return out;
}

ordered_json state_to_json(const StateSnapshot& snap) {
    ordered_json out;
    out["resource_id"] = snap.resource_id;
    out["resource_type"] = snap.resource_type;
    out["owner"] = snap.owner;
    out["homework_id"] = snap.homework_id;
    out["submitted"] = snap.submitted;
    out["graded"] = snap.graded;
    out["review_count"] = snap.review_count;
    out["reviewers"] = snap.reviewers;
    out["version_count"] = snap.version_count;
    out["requester_is_author"] = snap.requester_is_author;
    out["requester_has_reviewed"] = snap.requester_has_reviewed;
    out["homework_graded"] = snap.homework_graded;
    out["grade_creator"] = snap.grade_creator;
    out["already_appended"] = snap.already_appended;
    out["appended_review_ids"] = snap.appended_review_ids;
    return out;
}

[[noreturn]] void fail_line(std::size_t line_no, const std::string& message) {
    std::string where = line_no == 0 ? std::string("record")
                                     : "record at line " + std::to_string(line_no);
    throw std::runtime_error(where + ": " + message);
}

void check_object_keys(const ordered_json& obj, const char* what,
                       const std::vector<const char*>& keys, std::size_t line_no) {
    if (!obj.is_object()) fail_line(line_no, std::string(what) + " is not an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) ==
            keys.end()) {
            fail_line(line_no, std::string(what) + " has unknown field " + key);
        }
    }
    for (const char* key : keys) {
        if (!obj.contains(key)) {
            fail_line(line_no, std::string(what) + " is missing field " + std::string(key));
        }
    }
}

AccessRequest request_from_json(const ordered_json& obj, std::size_t line_no) {
    check_object_keys(obj, "request", {"user_id", "action", "resource_id", "timestamp"},
                      line_no);
    AccessRequest request;
    request.user = obj.at("user_id").get<std::string>();
    std::string action_name = obj.at("action").get<std::string>();
    auto action = action_from_string(action_name);
    if (!action) fail_line(line_no, "unknown action " + action_name);
    request.action = *action;
    request.resource = obj.at("resource_id").get<std::string>();
    request.timestamp = obj.at("timestamp").get<std::string>();
    return request;
}

StateSnapshot state_from_json(const ordered_json& obj, std::size_t line_no) {
    check_object_keys(obj, "state",
                      {"resource_id", "resource_type", "owner", "homework_id", "submitted",
                       "graded", "review_count", "reviewers", "version_count",
                       "requester_is_author", "requester_has_reviewed", "homework_graded",
                       "grade_creator", "already_appended", "appended_review_ids"},
                      line_no);
    StateSnapshot snap;
    snap.resource_id = obj.at("resource_id").get<std::string>();
    snap.resource_type = obj.at("resource_type").get<std::string>();
    snap.owner = obj.at("owner").get<std::string>();
    snap.homework_id = obj.at("homework_id").get<std::string>();
    snap.submitted = obj.at("submitted").get<bool>();
    snap.graded = obj.at("graded").get<bool>();
    snap.review_count = obj.at("review_count").get<int>();
    snap.reviewers = obj.at("reviewers").get<std::vector<std::string>>();
    snap.version_count = obj.at("version_count").get<int>();
    snap.requester_is_author = obj.at("requester_is_author").get<bool>();
    snap.requester_has_reviewed = obj.at("requester_has_reviewed").get<bool>();
    snap.homework_graded = obj.at("homework_graded").get<bool>();
    snap.grade_creator = obj.at("grade_creator").get<std::string>();
    snap.already_appended = obj.at("already_appended").get<bool>();
    snap.appended_review_ids = obj.at("appended_review_ids").get<std::vector<std::string>>();
    return snap;
}

} // namespace

std::string to_jsonl_line(const DatasetRecord& record) {
    ordered_json out;
    out["id"] = record.id;
    out["request"] = request_to_json(record.request);
    out["state"] = state_to_json(record.state);
    out["decision"] = std::string(to_string(record.decision));
    out["policy_id"] = record.policy_id;
    out["explanation"] = record.explanation;
    return out.dump();
}

DatasetRecord record_from_json_line(const std::string& line, std::size_t line_no) {
    ordered_json obj;
    try {
        obj = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& error) {
        fail_line(line_no, std::string("invalid JSON: ") + error.what());
    }
    check_object_keys(obj, "record",
                      {"id", "request", "state", "decision", "policy_id", "explanation"},
                      line_no);
    DatasetRecord record;
    record.id = obj.at("id").get<std::string>();
    record.request = request_from_json(obj.at("request"), line_no);
    // request_id is correlation metadata, not part of the line schema; the
    // record id is the canonical request id for dataset rows.
    record.request.request_id = record.id;
    record.state = state_from_json(obj.at("state"), line_no);
    std::string verdict = obj.at("decision").get<std::string>();
    if (verdict == "allow") {
        record.decision = Verdict::Allow;
    } else if (verdict == "deny") {
        record.decision = Verdict::Deny;
    } else {
        fail_line(line_no, "decision must be allow or deny, got " + verdict);
    }
    record.policy_id = obj.at("policy_id").get<std::string>();
    record.explanation = obj.at("explanation").get<std::string>();
    return record;
}

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const DatasetRecord& record : records) {
        out << to_jsonl_line(record) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<DatasetRecord> read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    std::vector<DatasetRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) fail_line(line_no, "empty line");
        records.push_back(record_from_json_line(line, line_no));
    }
    return records;
}

std::string canonical_input(const AccessRequest& request, const StateSnapshot& snap) {
    ordered_json out;
    out["request"] = request_to_json(request);
    out["state"] = state_to_json(snap);
    return out.dump();
}

std::string state_to_json_text(const StateSnapshot& snap) {
    return state_to_json(snap).dump();
}

StateSnapshot state_from_json_text(const std::string& text) {
    ordered_json parsed = ordered_json::parse(text, nullptr, false);
    if (parsed.is_discarded()) throw std::runtime_error("state: not valid JSON");
    return state_from_json(parsed, 0);
}

const std::string& decider_instruction() {
    // Matches policies/decider_prompt.txt; a test pins the two together.
    static const std::string instruction =
        "You are an access control decision engine for a classroom homework workflow. "
        "You receive a JSON object with a \"request\" (user_id, action, resource_id, "
        "timestamp) and a \"state\" (a snapshot of the target resource and its workflow "
        "context). Decide whether the request is allowed under the classroom policies: "
        "any user may upload homework; only the author may replace or submit an "
        "unsubmitted homework; reviews require a submitted, ungraded homework, a "
        "reviewer who is neither the author nor a prior reviewer, and fewer than 3 "
        "existing reviews; only the review creator may revise a review before grading; "
        "grading requires at least 2 reviews and no existing grade; only the grade "
        "creator may append a not-yet-appended review of the graded homework. Respond "
        "with a single JSON object with exactly two keys: \"decision\" (\"allow\" or "
        "\"deny\") and \"explanation\" (one sentence citing the decisive conditions).";
    return instruction;
}

std::string to_training_line(const DatasetRecord& record) {
    ordered_json out;
    out["instruction"] = decider_instruction();
    out["input"] = canonical_input(record.request, record.state);
    ordered_json output;
    output["decision"] = std::string(to_string(record.decision));
    output["explanation"] = record.explanation;
    out["output"] = std::move(output);
    return out.dump();
}

void export_training(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const DatasetRecord& record : records) {
        out << to_training_line(record) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

struct StratumKey {
    ActionKind action;
    Verdict decision;
    bool operator<(const StratumKey& other) const {
        if (action != other.action) return action < other.action;
        return decision < other.decision;
    }
};

} // namespace

SplitResult split(const std::vector<DatasetRecord>& records, double train_frac,
                  double val_frac, double test_frac, std::uint64_t seed) {
    const double fracs[3] = {train_frac, val_frac, test_frac};
    double sum = 0;
    for (double f : fracs) {
        if (f < 0 || !(std::isfinite(f))) {
            throw std::invalid_argument("split: fractions must be nonnegative");
        }
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("split: fractions must sum to 1");
    }

    const std::size_t n = records.size();
    // Global totals by largest remainder, exact by construction.
    std::size_t totals[3];
    std::size_t assigned = 0;
    double remainders[3];
    for (int i = 0; i < 3; ++i) {
        double exact = static_cast<double>(n) * fracs[i];
        totals[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
        remainders[i] = exact - static_cast<double>(totals[i]);
        assigned += totals[i];
    }
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i) {
            if (remainders[i] > remainders[best] + 1e-12) best = i;
        }
        ++totals[best];
        remainders[best] = -1;
        ++assigned;
    }

    // Group record indices by stratum, input order preserved.
    std::map<StratumKey, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < n; ++i) {
        strata[{records[i].request.action, records[i].decision}].push_back(i);
    }

    // Per-stratum floor allocation, then top-ups constrained to the exact
    // global totals, ordered by largest remainder. Each (stratum, split)
    // pair takes at most one top-up, keeping every stratum within one
    // record of proportionality.
    struct TopUp {
        double remainder;
        std::size_t stratum_index;
        int split;
    };
    std::vector<std::vector<std::size_t>> stratum_alloc;
    std::vector<const std::vector<std::size_t>*> stratum_members;
    std::vector<TopUp> topups;
    std::size_t used[3] = {0, 0, 0};
    std::size_t stratum_index = 0;
    std::vector<std::size_t> stratum_need;
    for (const auto& [key, members] : strata) {
        (void)key;
        std::vector<std::size_t> alloc(3);
        std::size_t total_alloc = 0;
        for (int i = 0; i < 3; ++i) {
            double exact = static_cast<double>(members.size()) * fracs[i];
            alloc[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
            topups.push_back({exact - static_cast<double>(alloc[i]), stratum_index, i});
            total_alloc += alloc[i];
            used[i] += alloc[i];
        }
        stratum_need.push_back(members.size() - total_alloc);
        stratum_alloc.push_back(std::move(alloc));
        stratum_members.push_back(&members);
        ++stratum_index;
    }
    std::sort(topups.begin(), topups.end(), [](const TopUp& a, const TopUp& b) {
        if (a.remainder != b.remainder) return a.remainder > b.remainder;
        if (a.stratum_index != b.stratum_index) return a.stratum_index < b.stratum_index;
        return a.split < b.split;
    });
    for (const TopUp& candidate : topups) {
        if (stratum_need[candidate.stratum_index] == 0) continue;
        if (used[candidate.split] >= totals[candidate.split]) continue;
        ++stratum_alloc[candidate.stratum_index][candidate.split];
        ++used[candidate.split];
        --stratum_need[candidate.stratum_index];
    }
    // Fallback for leftovers the remainder ordering could not place.
    for (std::size_t s = 0; s < stratum_need.size(); ++s) {
        while (stratum_need[s] > 0) {
            bool placed = false;
            for (int i = 0; i < 3; ++i) {
                if (used[i] < totals[i]) {
                    ++stratum_alloc[s][i];
                    ++used[i];
                    --stratum_need[s];
                    placed = true;
                    break;
                }
            }
            if (!placed) throw std::logic_error("split: allocation failed");
        }
    }

    // Shuffle each stratum with a stream derived from (seed, stratum),
    // slice, then restore input order inside each part.
    std::vector<int> destination(n, 2);
    std::size_t s = 0;
    for (const auto& [key, members] : strata) {
        std::vector<std::size_t> shuffled = members;
        std::string key_name = std::string(to_string(key.action)) + "/" +
                               std::string(to_string(key.decision));
        Rng rng(mix64(seed ^ stable_hash(key_name)));
        rng.shuffle(shuffled);
        std::size_t offset = 0;
        for (int i = 0; i < 3; ++i) {
            for (std::size_t k = 0; k < stratum_alloc[s][i]; ++k) {
                destination[shuffled[offset++]] = i;
            }
        }
        ++s;
    }

    SplitResult result;
    for (std::size_t i = 0; i < n; ++i) {
        switch (destination[i]) {
            case 0: result.train.push_back(records[i]); break;
            case 1: result.val.push_back(records[i]); break;
            default: result.test.push_back(records[i]); break;
        }
    }
    return result;
}

StatsReport dataset_stats(const std::vector<DatasetRecord>& records) {
    StatsReport report;
    report.total = records.size();
    std::map<ActionKind, std::size_t> allow_counts;
    for (const DatasetRecord& record : records) {
        ++report.per_action_count[record.request.action];
        if (record.decision == Verdict::Allow) ++allow_counts[record.request.action];
        Decision decision = decide(record.state, record.request);
        for (const std::string& condition : decision.violated) {
            ++report.violated_condition_histogram[condition];
        }
    }
    for (const auto& [action, count] : report.per_action_count) {
        report.per_action_allow_rate[action] =
            count == 0 ? 0.0
                       : static_cast<double>(allow_counts[action]) / static_cast<double>(count);
    }
    return report;
}

std::string render_stats(const StatsReport& stats) {
    std::ostringstream out;
    out << "records: " << stats.total << "\n";
    out << "per-action counts and allow rates:\n";
    char line[128];
    for (const auto& [action, count] : stats.per_action_count) {
        double rate = stats.per_action_allow_rate.count(action)
                          ? stats.per_action_allow_rate.at(action)
                          : 0.0;
        std::snprintf(line, sizeof(line), "  %-24s %8zu  allow_rate=%.3f\n",
                      std::string(to_string(action)).c_str(), count, rate);
        out << line;
    }
    out << "violated-condition histogram:\n";
    for (const auto& [condition, count] : stats.violated_condition_histogram) {
        std::snprintf(line, sizeof(line), "  %-28s %8zu\n", condition.c_str(), count);
        out << line;
    }
    return out.str();
}

} // namespace aclab
