#include "aclab/explain.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "aclab/model.hpp"

namespace aclab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Kept byte-identical to policies/explanations.tmpl; a test pins the two
// together.
const char* kBuiltinTemplates = R"TMPL(# Clause templates for decision explanations.
# Key: <ConditionId>.satisfied or <ConditionId>.violated, plus the
# special keys P1.summary and NoPolicy.denied.
# Placeholders: {requester} {resource} {action} {owner} {author} {creator}
# {homework} {review_count} {version_count} {grade_creator} {resource_type}

P1.summary = any legitimate user may upload homework
NoPolicy.denied = no policy governs action {action}; denied by default

P2.resource_is_homework.satisfied = {resource} is a homework
P2.resource_is_homework.violated = {resource} is a {resource_type}, not a homework
P2.is_author.satisfied = requester {requester} is the author of {resource}
P2.is_author.violated = requester {requester} is not the author ({owner}) of {resource}
P2.not_submitted.satisfied = {resource} is not submitted; versions may be replaced
P2.not_submitted.violated = {resource} has already been submitted; versions are frozen

P3.resource_is_homework.satisfied = {resource} is a homework
P3.resource_is_homework.violated = {resource} is a {resource_type}, not a homework
P3.is_author.satisfied = requester {requester} is the author of {resource}
P3.is_author.violated = requester {requester} is not the author ({owner}) of {resource}
P3.not_submitted.satisfied = {resource} has not been submitted yet
P3.not_submitted.violated = {resource} has already been submitted

P4.resource_is_homework.satisfied = {resource} is a homework
P4.resource_is_homework.violated = {resource} is a {resource_type}, not a homework
P4.submitted.satisfied = {resource} is submitted and open for review
P4.submitted.violated = {resource} is not submitted; only submitted homework can be reviewed
P4.not_author.satisfied = requester {requester} is not the author of {resource}
P4.not_author.violated = requester {requester} is the author of {resource}; reviewers must not be the author
P4.not_prior_reviewer.satisfied = requester {requester} has not reviewed {resource} before
P4.not_prior_reviewer.violated = requester {requester} has already reviewed {resource}
P4.review_count_lt_3.satisfied = review quota open; review_count={review_count}
P4.review_count_lt_3.violated = review quota exhausted; review_count={review_count} of 3
P4.ungraded.satisfied = {resource} is not graded yet
P4.ungraded.violated = {resource} is already graded; reviews are closed

P5.resource_is_review.satisfied = {resource} is a review
P5.resource_is_review.violated = {resource} is a {resource_type}, not a review
P5.is_creator.satisfied = requester {requester} created review {resource}
P5.is_creator.violated = requester {requester} did not create review {resource} (creator is {owner})
P5.ungraded.satisfied = the homework of {resource} is not graded yet
P5.ungraded.violated = the homework of {resource} is already graded; revisions are closed

P6.resource_is_homework.satisfied = {resource} is a homework
P6.resource_is_homework.violated = {resource} is a {resource_type}, not a homework
P6.min_two_reviews.satisfied = at least 2 reviews exist; review_count={review_count}
P6.min_two_reviews.violated = grading requires at least 2 reviews; review_count={review_count}
P6.not_already_graded.satisfied = {resource} has no grade yet
P6.not_already_graded.violated = {resource} already has a grade

P7.resource_is_review.satisfied = {resource} is a review
P7.resource_is_review.violated = {resource} is a {resource_type}, not a review
P7.is_grade_creator.satisfied = requester {requester} created the grade on the homework of {resource}
P7.is_grade_creator.violated = requester {requester} did not create the grade on this homework; grade_creator={grade_creator}
P7.review_matches_grade.satisfied = the homework of review {resource} has a grade to append to
P7.review_matches_grade.violated = the homework of review {resource} has no grade; nothing to append to
P7.not_already_appended.satisfied = review {resource} has not been appended yet
P7.not_already_appended.violated = review {resource} was already appended to the grade
)TMPL";

} // namespace

const ExplanationTemplates& ExplanationTemplates::builtin() {
    static const ExplanationTemplates instance = parse(kBuiltinTemplates);
    return instance;
}

ExplanationTemplates ExplanationTemplates::parse(const std::string& text) {
    ExplanationTemplates result;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("explanation template line " + std::to_string(line_no) +
                                     ": missing '='");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error("explanation template line " + std::to_string(line_no) +
                                     ": empty key");
        }
        if (!result.entries_.emplace(key, value).second) {
            throw std::runtime_error("explanation template line " + std::to_string(line_no) +
                                     ": duplicate key " + key);
        }
    }
    return result;
}

ExplanationTemplates ExplanationTemplates::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open explanation template file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ExplanationTemplates::raw(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? std::string() : it->second;
}

std::string ExplanationTemplates::clause(const std::string& condition_id, bool satisfied,
                                         const AccessRequest& request,
                                         const StateSnapshot& snap) const {
    std::string key = condition_id + (satisfied ? ".satisfied" : ".violated");
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return "condition " + condition_id + (satisfied ? " satisfied" : " violated");
    }
    return fill_placeholders(it->second, request, snap);
}

std::string fill_placeholders(const std::string& text, const AccessRequest& request,
                              const StateSnapshot& snap) {
    std::string out;
    out.reserve(text.size() + 16);
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            out += text[i++];
            continue;
        }
        std::size_t close = text.find('}', i);
        if (close == std::string::npos) {
            out += text.substr(i);
            break;
        }
        std::string name = text.substr(i + 1, close - i - 1);
        if (name == "requester") {
            out += request.user;
        } else if (name == "resource") {
            out += request.resource;
        } else if (name == "action") {
            out += to_string(request.action);
        } else if (name == "owner" || name == "author" || name == "creator") {
            out += snap.owner;
        } else if (name == "homework") {
            out += snap.homework_id;
        } else if (name == "review_count") {
            out += std::to_string(snap.review_count);
        } else if (name == "version_count") {
            out += std::to_string(snap.version_count);
        } else if (name == "grade_creator") {
            out += snap.grade_creator;
        } else if (name == "resource_type") {
            out += snap.resource_type;
        } else {
            out += text.substr(i, close - i + 1); // unknown: keep verbatim
        }
        i = close + 1;
    }
    return out;
}

} // namespace aclab
