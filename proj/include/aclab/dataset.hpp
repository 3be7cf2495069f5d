#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "aclab/decision.hpp"
#include "aclab/model.hpp"

namespace aclab {

// One labeled example: the request, the state it was decided against,
// and the oracle's decision. Serialized as a single JSON line with
// canonical key order.
struct DatasetRecord {
    std::string id;
    AccessRequest request;
    StateSnapshot state;
    Verdict decision = Verdict::Deny;
    std::string policy_id;  // "P1".."P7" or "none"
    std::string explanation;

    bool operator==(const DatasetRecord&) const = default;
};

// JSONL, canonical key order, LF line endings. parse_* reject unknown
// keys and missing fields with std::runtime_error naming the line.
std::string to_jsonl_line(const DatasetRecord& record);
DatasetRecord record_from_json_line(const std::string& line, std::size_t line_no = 0);

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> read_dataset(const std::string& path);

// Canonical request+state serialization shared by the training export
// and the remote decider prompt. Compact JSON, canonical key order.
std::string canonical_input(const AccessRequest& request, const StateSnapshot& snap);

// Bare StateSnapshot object in the record state schema, strict on both
// directions. Used by the HTTP service for inline state and resource
// snapshots.
std::string state_to_json_text(const StateSnapshot& snap);
StateSnapshot state_from_json_text(const std::string& text);

// Fixed instruction text shipped at policies/decider_prompt.txt and
// compiled in here.
const std::string& decider_instruction();

// Instruction-tuning JSONL: {"instruction", "input", "output"} per line,
// output = {"decision", "explanation"}.
std::string to_training_line(const DatasetRecord& record);
void export_training(const std::string& path, const std::vector<DatasetRecord>& records);

struct SplitResult {
    std::vector<DatasetRecord> train;
    std::vector<DatasetRecord> val;
    std::vector<DatasetRecord> test;
};

// Deterministic stratified split on (action, decision). Split sizes hit
// the exact global totals implied by the fractions; each stratum is
// proportioned to within one record. Record order within each part
// follows the input order. Fractions must be nonnegative and sum to 1
// (tolerance 1e-9).
SplitResult split(const std::vector<DatasetRecord>& records, double train_frac,
                  double val_frac, double test_frac, std::uint64_t seed);

struct StatsReport {
    std::size_t total = 0;
    std::map<ActionKind, std::size_t> per_action_count;
    std::map<ActionKind, double> per_action_allow_rate;
    std::map<std::string, std::size_t> violated_condition_histogram;
};

StatsReport dataset_stats(const std::vector<DatasetRecord>& records);
std::string render_stats(const StatsReport& stats);

} // namespace aclab
