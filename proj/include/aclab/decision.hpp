#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "aclab/action.hpp"

namespace aclab {

enum class Verdict { Allow, Deny };

inline const char* to_string(Verdict v) { return v == Verdict::Allow ? "allow" : "deny"; }

// Outcome of one authorization check. satisfied/violated list condition
// ids (e.g. "P4.not_author") in catalog order; the explanation is a
// human-readable rendering of the decisive clauses.
struct Decision {
    Verdict verdict = Verdict::Deny;
    PolicyId policy = PolicyId::NoPolicy;
    std::string policy_label;        // "P1".."P7" or "none"
    std::vector<std::string> satisfied;
    std::vector<std::string> violated;
    std::string explanation;
    bool error_flag = false;         // set by deciders that failed closed

    bool allowed() const { return verdict == Verdict::Allow; }

    bool operator==(const Decision&) const = default;
};

// Raised by apply_effect when asked to execute a denied request. Carries
// the full decision so callers can surface the explanation.
struct PolicyViolationError : std::runtime_error {
    Decision decision;
    explicit PolicyViolationError(Decision d)
        : std::runtime_error(d.explanation), decision(std::move(d)) {}
};

} // namespace aclab
