#pragma once

#include <map>
#include <string>

namespace aclab {

struct StateSnapshot;
struct AccessRequest;

// Clause text templates keyed by "<ConditionId>.satisfied" /
// "<ConditionId>.violated" plus the special keys "P1.summary" and
// "NoPolicy.denied". Values may contain {placeholders} filled from the
// request and snapshot at render time.
class ExplanationTemplates {
  public:
    // Compiled-in copy of policies/explanations.tmpl.
    static const ExplanationTemplates& builtin();

    // Parses the key=value template format. Lines starting with '#' and
    // blank lines are skipped. Throws std::runtime_error on a malformed
    // line (no '=') or duplicate key.
    static ExplanationTemplates parse(const std::string& text);
    static ExplanationTemplates load(const std::string& path);

    // Clause for one condition id. Falls back to a generic
    // "condition <id> satisfied|violated" clause when the key is absent.
    std::string clause(const std::string& condition_id, bool satisfied,
                       const AccessRequest& request, const StateSnapshot& snap) const;

    // Raw value lookup, no placeholder substitution. Empty when missing.
    std::string raw(const std::string& key) const;

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    std::size_t size() const { return entries_.size(); }

  private:
    std::map<std::string, std::string> entries_;
};

// Replaces {requester} {resource} {action} {owner} {author} {creator}
// {homework} {review_count} {version_count} {grade_creator} with values
// from the request/snapshot. Unknown placeholders are left verbatim.
std::string fill_placeholders(const std::string& text, const AccessRequest& request,
                              const StateSnapshot& snap);

} // namespace aclab
