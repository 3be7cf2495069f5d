#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "aclab/eval.hpp"
#include "aclab/oracle.hpp"
#include "aclab/rng.hpp"

namespace aclab {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kConventions =
    "allow is the positive class; precision and recall are 1.0 on an empty "
    "denominator; macro F1 is the unweighted mean of the allow and deny F1 scores";

class OracleDecider : public Decider {
  public:
    std::string name() const override { return "oracle"; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override {
        return aclab::decide(snap, request);
    }
};

class DslDecider : public Decider {
  public:
    DslDecider(dsl::CompiledPolicySet compiled, std::string name)
        : compiled_(std::move(compiled)), name_(std::move(name)) {}
    std::string name() const override { return name_; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override {
        return compiled_.evaluate(snap, request);
    }

  private:
    dsl::CompiledPolicySet compiled_;
    std::string name_;
};

class RbacDecider : public Decider {
  public:
    explicit RbacDecider(RbacConfig config) : config_(std::move(config)) {}
    std::string name() const override { return "rbac"; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override {
        (void)snap;
        return rbac_decide(config_, request);
    }

  private:
    RbacConfig config_;
};

class AbacDecider : public Decider {
  public:
    explicit AbacDecider(AbacRuleSet rules) : rules_(std::move(rules)) {}
    std::string name() const override { return "abac"; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override {
        return abac_decide(rules_, snap, request);
    }

  private:
    AbacRuleSet rules_;
};

class DacDecider : public Decider {
  public:
    explicit DacDecider(DacAcl acl) : acl_(std::move(acl)) {}
    std::string name() const override { return "dac"; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override {
        return dac_decide(acl_, snap, request);
    }

  private:
    DacAcl acl_;
};

class AlwaysDenyDecider : public Decider {
  public:
    std::string name() const override { return "always_deny"; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override {
        (void)snap;
        (void)request;
        Decision decision;
        decision.verdict = Verdict::Deny;
        decision.policy = PolicyId::NoPolicy;
        decision.policy_label = "none";
        decision.explanation = "DENY: Policy none — trivial decider denies everything";
        return decision;
    }
};

class NoisyDecider : public Decider {
  public:
    NoisyDecider(std::shared_ptr<const Decider> inner, double epsilon, std::uint64_t seed)
        : inner_(std::move(inner)), epsilon_(epsilon), seed_(seed) {
        if (!inner_) throw std::invalid_argument("noisy decider: inner decider is null");
        if (epsilon_ < 0.0 || epsilon_ > 1.0) {
            throw std::invalid_argument("noisy decider: epsilon must be in [0, 1]");
        }
    }
    std::string name() const override { return inner_->name() + "+noise"; }
    Decision decide(const StateSnapshot& snap, const AccessRequest& request) const override {
        Decision decision = inner_->decide(snap, request);
        if (keyed_unit(seed_, request.request_id) < epsilon_) {
            decision.verdict =
                decision.verdict == Verdict::Allow ? Verdict::Deny : Verdict::Allow;
            decision.explanation = "noise-flipped: " + decision.explanation;
        }
        return decision;
    }

  private:
    std::shared_ptr<const Decider> inner_;
    double epsilon_;
    std::uint64_t seed_;
};

double percentile_nearest_rank(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted.size())));
    if (rank < 1) rank = 1;
    if (rank > sorted.size()) rank = sorted.size();
    return sorted[rank - 1];
}

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    if (tp == 0 && fp == 0 && fn == 0) return 1.0;
    double precision = (tp + fp == 0) ? 1.0 : static_cast<double>(tp) / (tp + fp);
    double recall = (tp + fn == 0) ? 1.0 : static_cast<double>(tp) / (tp + fn);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

std::string fmt(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

ordered_json report_to_json(const MetricsReport& report) {
    ordered_json j;
    j["decider"] = report.decider;
    j["n"] = report.n;
    j["accuracy"] = report.accuracy;
    j["precision_allow"] = report.precision_allow;
    j["recall_allow"] = report.recall_allow;
    j["f1_allow"] = report.f1_allow;
    j["f1_deny"] = report.f1_deny;
    j["macro_f1"] = report.macro_f1;
    ordered_json per_action = ordered_json::object();
    for (ActionKind action : kAllActions) {
        auto hit = report.per_action_accuracy.find(action);
        if (hit == report.per_action_accuracy.end()) continue;
        ordered_json cell;
        cell["count"] = report.per_action_count.at(action);
        cell["accuracy"] = hit->second;
        per_action[std::string(to_string(action))] = cell;
    }
    j["per_action"] = per_action;
    j["confusion"] = {{"tp", report.confusion.tp},
                      {"fp", report.confusion.fp},
                      {"tn", report.confusion.tn},
                      {"fn", report.confusion.fn}};
    j["latency_ms"] = {{"mean", report.latency.mean_ms},
                       {"p50", report.latency.p50_ms},
                       {"p95", report.latency.p95_ms}};
    j["throughput_rps"] = report.throughput_rps;
    j["error_count"] = report.error_count;
    return j;
}

std::string render_text(const std::vector<MetricsReport>& reports) {
    std::ostringstream out;
    out << "# conventions: " << kConventions << "\n\n";
    out << "per-action accuracy\n";
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%-24s %8s", "action", "count");
    out << buffer;
    for (const MetricsReport& report : reports) {
        std::snprintf(buffer, sizeof(buffer), " %14s", report.decider.c_str());
        out << buffer;
    }
    out << "\n";
    for (ActionKind action : kAllActions) {
        std::size_t count = 0;
        if (!reports.empty()) {
            auto hit = reports.front().per_action_count.find(action);
            if (hit != reports.front().per_action_count.end()) count = hit->second;
        }
        std::snprintf(buffer, sizeof(buffer), "%-24s %8zu",
                      std::string(to_string(action)).c_str(), count);
        out << buffer;
        for (const MetricsReport& report : reports) {
            auto hit = report.per_action_accuracy.find(action);
            if (hit == report.per_action_accuracy.end()) {
                std::snprintf(buffer, sizeof(buffer), " %14s", "-");
            } else {
                std::snprintf(buffer, sizeof(buffer), " %14.4f", hit->second);
            }
            out << buffer;
        }
        out << "\n";
    }
    for (const MetricsReport& report : reports) {
        out << "\n" << report.decider << "\n";
        out << "  n=" << report.n << " accuracy=" << fmt(report.accuracy)
            << " precision_allow=" << fmt(report.precision_allow)
            << " recall_allow=" << fmt(report.recall_allow) << "\n";
        out << "  f1_allow=" << fmt(report.f1_allow) << " f1_deny=" << fmt(report.f1_deny)
            << " macro_f1=" << fmt(report.macro_f1) << "\n";
        out << "  confusion tp=" << report.confusion.tp << " fp=" << report.confusion.fp
            << " tn=" << report.confusion.tn << " fn=" << report.confusion.fn << "\n";
        out << "  latency_ms mean=" << fmt(report.latency.mean_ms)
            << " p50=" << fmt(report.latency.p50_ms) << " p95=" << fmt(report.latency.p95_ms)
            << " throughput_rps=" << fmt(report.throughput_rps)
            << " errors=" << report.error_count << "\n";
    }
    return out.str();
}

std::string render_csv(const std::vector<MetricsReport>& reports) {
    std::ostringstream out;
    out << "# conventions: " << kConventions << "\n";
    out << "decider,scope,count,accuracy,precision_allow,recall_allow,f1_allow,f1_deny,"
           "macro_f1,latency_mean_ms,latency_p50_ms,latency_p95_ms,throughput_rps,"
           "error_count\n";
    for (const MetricsReport& report : reports) {
        for (ActionKind action : kAllActions) {
            auto hit = report.per_action_accuracy.find(action);
            if (hit == report.per_action_accuracy.end()) continue;
            out << report.decider << "," << to_string(action) << ","
                << report.per_action_count.at(action) << "," << fmt(hit->second)
                << ",,,,,,,,,,\n";
        }
        out << report.decider << ",all," << report.n << "," << fmt(report.accuracy) << ","
            << fmt(report.precision_allow) << "," << fmt(report.recall_allow) << ","
            << fmt(report.f1_allow) << "," << fmt(report.f1_deny) << ","
            << fmt(report.macro_f1) << "," << fmt(report.latency.mean_ms) << ","
            << fmt(report.latency.p50_ms) << "," << fmt(report.latency.p95_ms) << ","
            << fmt(report.throughput_rps) << "," << report.error_count << "\n";
    }
    return out.str();
}

} // namespace

std::unique_ptr<Decider> make_oracle_decider() { return std::make_unique<OracleDecider>(); }

std::unique_ptr<Decider> make_dsl_decider(dsl::CompiledPolicySet compiled, std::string name) {
    return std::make_unique<DslDecider>(std::move(compiled), std::move(name));
}

std::unique_ptr<Decider> make_rbac_decider(RbacConfig config) {
    return std::make_unique<RbacDecider>(std::move(config));
}

std::unique_ptr<Decider> make_abac_decider(AbacRuleSet rules) {
    return std::make_unique<AbacDecider>(std::move(rules));
}

std::unique_ptr<Decider> make_dac_decider(DacAcl acl) {
    return std::make_unique<DacDecider>(std::move(acl));
}

std::unique_ptr<Decider> make_always_deny_decider() {
    return std::make_unique<AlwaysDenyDecider>();
}

std::unique_ptr<Decider> make_noisy_decider(std::shared_ptr<const Decider> inner,
                                            double epsilon, std::uint64_t seed) {
    return std::make_unique<NoisyDecider>(std::move(inner), epsilon, seed);
}

void fill_derived_metrics(MetricsReport& report) {
    const ConfusionCounts& c = report.confusion;
    report.n = c.tp + c.fp + c.tn + c.fn;
    report.accuracy =
        report.n == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(report.n);
    report.precision_allow =
        (c.tp + c.fp == 0) ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
    report.recall_allow =
        (c.tp + c.fn == 0) ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
    report.f1_allow = f1_from_counts(c.tp, c.fp, c.fn);
    report.f1_deny = f1_from_counts(c.tn, c.fn, c.fp);
    report.macro_f1 = 0.5 * (report.f1_allow + report.f1_deny);
}

MetricsReport evaluate(const Decider& decider, const std::vector<DatasetRecord>& records) {
    if (records.empty()) throw std::invalid_argument("evaluate: empty dataset");
    MetricsReport report;
    report.decider = decider.name();

    std::vector<double> latencies;
    latencies.reserve(records.size());
    std::map<ActionKind, std::size_t> correct;
    double total_ms = 0.0;

    for (const DatasetRecord& record : records) {
        AccessRequest request = record.request;
        request.request_id = record.id;

        Verdict predicted;
        auto start = std::chrono::steady_clock::now();
        try {
            predicted = decider.decide(record.state, request).verdict;
        } catch (const std::exception&) {
            ++report.error_count;
            predicted = record.decision == Verdict::Allow ? Verdict::Deny : Verdict::Allow;
        }
        auto stop = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(stop - start).count();
        latencies.push_back(ms);
        total_ms += ms;

        bool label_allow = record.decision == Verdict::Allow;
        bool predicted_allow = predicted == Verdict::Allow;
        if (label_allow && predicted_allow) ++report.confusion.tp;
        if (!label_allow && predicted_allow) ++report.confusion.fp;
        if (!label_allow && !predicted_allow) ++report.confusion.tn;
        if (label_allow && !predicted_allow) ++report.confusion.fn;

        ++report.per_action_count[record.request.action];
        if (label_allow == predicted_allow) ++correct[record.request.action];
    }

    fill_derived_metrics(report);
    for (const auto& [action, count] : report.per_action_count) {
        report.per_action_accuracy[action] =
            static_cast<double>(correct[action]) / static_cast<double>(count);
    }

    std::sort(latencies.begin(), latencies.end());
    report.latency.mean_ms = total_ms / static_cast<double>(latencies.size());
    report.latency.p50_ms = percentile_nearest_rank(latencies, 0.50);
    report.latency.p95_ms = percentile_nearest_rank(latencies, 0.95);
    report.throughput_rps =
        total_ms > 0.0 ? static_cast<double>(records.size()) / (total_ms / 1000.0) : 0.0;
    return report;
}

std::string render_report(const std::vector<MetricsReport>& reports, ReportFormat format) {
    switch (format) {
        case ReportFormat::Text:
            return render_text(reports);
        case ReportFormat::Json: {
            ordered_json j;
            j["conventions"] = kConventions;
            ordered_json rows = ordered_json::array();
            for (const MetricsReport& report : reports) rows.push_back(report_to_json(report));
            j["reports"] = rows;
            return j.dump(2) + "\n";
        }
        case ReportFormat::Csv:
            return render_csv(reports);
    }
    throw std::logic_error("unreachable ReportFormat");
}

ReportFormat report_format_from_string(const std::string& name) {
    if (name == "text" || name == "txt") return ReportFormat::Text;
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    throw std::invalid_argument("unknown report format: " + name);
}

} // namespace aclab
