#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "aclab/baselines.hpp"
#include "aclab/dataset.hpp"
#include "aclab/decision.hpp"
#include "aclab/dsl/compile.hpp"
#include "aclab/model.hpp"

namespace aclab {

// A scoring subject. decide must be total: implementations that can fail
// return a Deny with error_flag set instead of throwing.
class Decider {
  public:
    virtual ~Decider() = default;
    virtual std::string name() const = 0;
    virtual Decision decide(const StateSnapshot& snap, const AccessRequest& request) const = 0;
};

std::unique_ptr<Decider> make_oracle_decider();
std::unique_ptr<Decider> make_dsl_decider(dsl::CompiledPolicySet compiled,
                                          std::string name = "dsl");
std::unique_ptr<Decider> make_rbac_decider(RbacConfig config);
std::unique_ptr<Decider> make_abac_decider(AbacRuleSet rules);
std::unique_ptr<Decider> make_dac_decider(DacAcl acl);
std::unique_ptr<Decider> make_always_deny_decider();

// Flips the inner verdict independently with probability epsilon, keyed
// on (seed, record id) so evaluation order does not matter. The record
// id travels in AccessRequest::request_id during evaluation.
std::unique_ptr<Decider> make_noisy_decider(std::shared_ptr<const Decider> inner,
                                            double epsilon, std::uint64_t seed);

struct ConfusionCounts {
    std::size_t tp = 0; // allow predicted, allow labeled
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

struct LatencyStats {
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
};

// Conventions (documented in every rendered report header): allow is the
// positive class; precision and recall are 1.0 when their denominator is
// 0; F1 is 0 when precision+recall is 0 except the fully degenerate
// tp=fp=fn=0 case, which scores 1; macro_f1 is the unweighted mean of
// the allow and deny F1 scores.
struct MetricsReport {
    std::string decider;
    std::size_t n = 0;
    double accuracy = 0.0;
    double precision_allow = 0.0;
    double recall_allow = 0.0;
    double f1_allow = 0.0;
    double f1_deny = 0.0;
    double macro_f1 = 0.0;
    std::map<ActionKind, double> per_action_accuracy;
    std::map<ActionKind, std::size_t> per_action_count;
    ConfusionCounts confusion;
    LatencyStats latency;
    double throughput_rps = 0.0;
    std::size_t error_count = 0;
};

// Scores the decider against every record. A thrown decider error is
// tallied in error_count and scored as an incorrect prediction of the
// opposite class. Throws std::invalid_argument on an empty dataset.
MetricsReport evaluate(const Decider& decider, const std::vector<DatasetRecord>& records);

// Metric arithmetic from raw counts, shared with evaluate. Exposed so
// the identity tests can drive it with synthetic confusion matrices.
void fill_derived_metrics(MetricsReport& report);

enum class ReportFormat { Text, Json, Csv };

// Text: per-action accuracy table, actions as rows in ActionKind order,
// deciders as columns in input order, then a global-metrics block per
// decider. Json re-parses losslessly; Csv is one row per
// (action, decider) plus global rows.
std::string render_report(const std::vector<MetricsReport>& reports, ReportFormat format);

ReportFormat report_format_from_string(const std::string& name);

} // namespace aclab
