#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "aclab/dsl/compile.hpp"
#include "aclab/dsl/parser.hpp"
#include "aclab/dsl/printer.hpp"
#include "aclab/dsl/validate.hpp"
#include "aclab/model.hpp"
#include "aclab/oracle.hpp"
#include "aclab/rng.hpp"
#include "support/doc_gen.hpp"

using namespace aclab;
using namespace aclab::dsl;

namespace {

const char* kClassroomPath = ACLAB_SOURCE_DIR "/policies/classroom.acpol";

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

} // namespace

TEST_CASE("tokenize basics") {
    CHECK(tokenize("").empty());

    std::vector<Token> header = tokenize("policy P4 on review_homework");
    REQUIRE(header.size() == 4);
    CHECK(header[0].kind == TokenKind::Keyword);
    CHECK(header[0].lexeme == "policy");
    CHECK(header[1].kind == TokenKind::Identifier);
    CHECK(header[1].lexeme == "P4");
    CHECK(header[2].kind == TokenKind::Keyword);
    CHECK(header[2].lexeme == "on");
    CHECK(header[3].kind == TokenKind::Identifier);
    CHECK(header[3].lexeme == "review_homework");

    std::vector<Token> call = tokenize("review_count(resource) < 3");
    REQUIRE(call.size() == 6);
    CHECK(call.back().kind == TokenKind::Integer);
    CHECK(call.back().lexeme == "3");

    // Positions are 1-based and advance across lines.
    std::vector<Token> lines = tokenize("policy\n  P1");
    CHECK(lines[0].line == 1);
    CHECK(lines[0].column == 1);
    CHECK(lines[1].line == 2);
    CHECK(lines[1].column == 3);
}

TEST_CASE("tokenize rejects illegal characters with a position") {
    try {
        tokenize("policy P1 on upload_homework { $ }");
        FAIL("expected ParseError");
    } catch (const ParseError& error) {
        CHECK(std::string(error.what()).find("illegal character '$'") != std::string::npos);
        CHECK(error.line == 1);
        CHECK(error.column == 32);
    }
    CHECK_THROWS_AS(tokenize("a ! b"), ParseError); // '!' only valid as '!='
}

TEST_CASE("reference file parses to seven policies") {
    CompiledPolicySet compiled = compile_file(kClassroomPath);
    CHECK(compiled.policies().size() == 7);
    for (ActionKind action : kAllActions) {
        CHECK(compiled.find(action) != nullptr);
    }
}

TEST_CASE("duplicate policy for an action errors at the second definition") {
    const char* source =
        "policy P6 on grade_homework {\n}\n"
        "policy P6b on grade_homework {\n}\n";
    try {
        parse_text(source);
        FAIL("expected ParseError");
    } catch (const ParseError& error) {
        CHECK(std::string(error.what()) == "duplicate policy for action grade_homework");
        CHECK(error.line == 3);
        CHECK(error.column == 1);
    }
}

TEST_CASE("dangling comparison reports the expected-operand message") {
    try {
        parse_text("policy P6 on grade_homework { require review_count(resource) < ; }");
        FAIL("expected ParseError");
    } catch (const ParseError& error) {
        CHECK(std::string(error.what()).find("expected integer or attribute path") !=
              std::string::npos);
        CHECK(error.line == 1);
        CHECK(error.column > 1);
    }
    // Truncated input fails the same way at end of input.
    CHECK_THROWS_WITH_AS(parse_text("policy P6 on grade_homework { require "
                                    "review_count(resource) <"),
                         "expected integer or attribute path, got end of input", ParseError);
}

TEST_CASE("unlabeled requirements get synthesized ids, labels are kept") {
    PolicyDoc doc = parse_text(
        "policy P2 on replace_homework {\n"
        "    require is_author: requester = resource.author;\n"
        "    require not resource.submitted;\n"
        "}\n");
    REQUIRE(doc.policies.size() == 1);
    REQUIRE(doc.policies[0].requirements.size() == 2);
    CHECK(doc.policies[0].requirements[0].condition_id == "P2.is_author");
    CHECK(doc.policies[0].requirements[0].labeled);
    CHECK(doc.policies[0].requirements[1].condition_id == "P2.c2");
    CHECK_FALSE(doc.policies[0].requirements[1].labeled);
}

TEST_CASE("validate flags wrong-resource attributes") {
    PolicyDoc doc = parse_text(
        "policy P5 on revise_review {\n"
        "    require resource.submitted;\n"
        "}\n");
    ValidationResult result = validate(doc, Dialect::Full);
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].message == "reviews have no attribute submitted");
    CHECK(result.errors[0].line == 2);
    CHECK(result.errors[0].column == 13);
}

TEST_CASE("validate reports every error, not just the first") {
    PolicyDoc doc = parse_text(
        "policy X on fly_to_moon {\n}\n"
        "policy P4 on review_homework {\n"
        "    require has_reviewed(requester);\n"
        "    require resource.creator = requester;\n"
        "    require dup: true;\n"
        "    require dup: false;\n"
        "}\n");
    ValidationResult result = validate(doc, Dialect::Full);
    CHECK_FALSE(result.ok());
    std::set<std::string> messages;
    for (const SemanticError& error : result.errors) {
        messages.insert(error.message);
        CHECK(error.line >= 1);
        CHECK(error.column >= 1);
    }
    CHECK(messages.count("unknown action fly_to_moon") == 1);
    CHECK(messages.count("builtin has_reviewed expects 2 arguments, got 1") == 1);
    CHECK(messages.count("homeworks have no attribute creator") == 1);
    CHECK(messages.count("duplicate condition id P4.dup") == 1);
    CHECK(result.errors.size() == 4);
}

TEST_CASE("validate enforces boolean requirements and comparison typing") {
    PolicyDoc doc = parse_text(
        "policy P6 on grade_homework {\n"
        "    require review_count(resource);\n"
        "    require resource.author < 3;\n"
        "    require resource.graded = 1;\n"
        "}\n");
    ValidationResult result = validate(doc, Dialect::Full);
    std::set<std::string> messages;
    for (const SemanticError& error : result.errors) messages.insert(error.message);
    CHECK(messages.count("requirement is not boolean") == 1);
    CHECK(messages.count("ordering comparison requires integer operands") == 1);
    CHECK(messages.count("comparison operands have mismatched types") == 1);
}

TEST_CASE("the scalar dialect rejects history builtins and joins") {
    PolicyDoc doc = parse_text(
        "policy P6 on grade_homework {\n"
        "    require review_count(resource) >= 2;\n"
        "}\n"
        "policy P7 on append_review_to_grade {\n"
        "    require resource.homework = resource.homework;\n"
        "}\n");
    CHECK(validate(doc, Dialect::Full).ok());
    ValidationResult scalar = validate(doc, Dialect::AbacScalar);
    std::set<std::string> messages;
    for (const SemanticError& error : scalar.errors) messages.insert(error.message);
    CHECK(messages.count("builtin review_count is outside the attribute dialect") == 1);
    CHECK(messages.count("resource.homework is outside the attribute dialect") == 1);
}

TEST_CASE("compile_text surfaces semantic errors with positions") {
    try {
        compile_text("policy P5 on revise_review { require resource.submitted; }");
        FAIL("expected runtime_error");
    } catch (const std::runtime_error& error) {
        std::string what = error.what();
        CHECK(what.find("policy validation failed") != std::string::npos);
        CHECK(what.find("reviews have no attribute submitted") != std::string::npos);
        CHECK(what.find("1:38") != std::string::npos);
    }
}

TEST_CASE("compiled policies carry an injected resource-type guard") {
    CompiledPolicySet compiled = compile_file(kClassroomPath);
    const CompiledPolicy* replace = compiled.find(ActionKind::ReplaceHomework);
    REQUIRE(replace != nullptr);
    REQUIRE(!replace->conditions.empty());
    CHECK(replace->conditions[0].id == "P2.resource_is_homework");
    CHECK(replace->conditions[0].synthetic_guard);
    const CompiledPolicy* upload = compiled.find(ActionKind::UploadHomework);
    REQUIRE(upload != nullptr);
    CHECK(upload->conditions.empty()); // upload has no guard: nothing exists yet
}

TEST_CASE("compiled classroom policies match the documented examples") {
    CompiledPolicySet compiled = compile_file(kClassroomPath);
    WorldState state = new_world(3, 0);
    state = apply_effect(state, make_request("u1", ActionKind::UploadHomework, "hw1")).first;

    Decision upload = compiled.evaluate(state, make_request("u2", ActionKind::UploadHomework,
                                                            state.peek_homework_id()));
    CHECK(upload.verdict == Verdict::Allow);

    state = apply_effect(state, make_request("u1", ActionKind::SubmitHomework, "hw1")).first;
    Decision review = compiled.evaluate(state, make_request("u1", ActionKind::ReviewHomework,
                                                            "hw1"));
    CHECK(review.verdict == Verdict::Deny);
    CHECK(std::find(review.violated.begin(), review.violated.end(), "P4.not_author") !=
          review.violated.end());
}

TEST_CASE("evaluation without a policy for the action denies by default") {
    CompiledPolicySet compiled =
        compile_text("policy P1 on upload_homework {\n}\n");
    WorldState state = new_world(2, 0);
    state = apply_effect(state, make_request("u1", ActionKind::UploadHomework, "hw1")).first;
    Decision decision = compiled.evaluate(state, make_request("u1", ActionKind::SubmitHomework,
                                                              "hw1"));
    CHECK(decision.verdict == Verdict::Deny);
    CHECK(decision.policy == PolicyId::NoPolicy);
    CHECK(decision.explanation.find("no policy") != std::string::npos);
}

TEST_CASE("pretty_print emits canonical text and round-trips the reference doc") {
    std::ifstream in(kClassroomPath);
    REQUIRE(in);
    std::string source((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    PolicyDoc doc = parse_text(source);
    std::string printed = pretty_print(doc);
    CHECK(doc_equal(parse_text(printed), doc));
    CHECK(pretty_print(parse_text(printed)) == printed); // idempotent formatting
}

TEST_CASE("pretty_print uses minimal parentheses") {
    PolicyDoc doc = parse_text(
        "policy P1 on upload_homework {\n"
        "    require a or b and not c;\n"
        "    require (a or b) and c;\n"
        "    require not (a or b);\n"
        "}\n");
    std::string printed = pretty_print(doc);
    CHECK(printed.find("require a or b and not c;") != std::string::npos);
    CHECK(printed.find("require (a or b) and c;") != std::string::npos);
    CHECK(printed.find("require not (a or b);") != std::string::npos);
}

TEST_CASE("round-trip property over 1000 generated docs") {
    Rng rng(20250814);
    for (int i = 0; i < 1000; ++i) {
        PolicyDoc doc = testsupport::random_doc(rng);
        std::string printed = pretty_print(doc);
        PolicyDoc reparsed;
        REQUIRE_NOTHROW(reparsed = parse_text(printed));
        REQUIRE(doc_equal(reparsed, doc));
        // Validation must be total over arbitrary parser output.
        REQUIRE_NOTHROW(validate(reparsed, Dialect::Full));
        REQUIRE_NOTHROW(validate(reparsed, Dialect::AbacScalar));
    }
}

TEST_CASE("tokenizer and parser survive random input without crashing") {
    Rng rng(99);
    const std::string alphabet =
        "policy on require and or not true false(){};:.,=<>! \n\tabcxyz0123456789_";
    int parsed_ok = 0;
    for (int i = 0; i < 20000; ++i) {
        std::string source;
        std::size_t length = rng.bounded(60);
        for (std::size_t k = 0; k < length; ++k) {
            source += alphabet[rng.bounded(alphabet.size())];
        }
        try {
            parse_text(source);
            ++parsed_ok;
        } catch (const ParseError& error) {
            CHECK(error.line >= 1);
            CHECK(error.column >= 1);
        }
    }
    CHECK(parsed_ok >= 0); // reaching here without a crash is the point
}

TEST_CASE("abac baseline reference file validates only in the scalar dialect") {
    CHECK_NOTHROW(compile_file(ACLAB_SOURCE_DIR "/policies/abac_baseline.acpol",
                               Dialect::AbacScalar));
    // The full classroom file must NOT fit the scalar dialect.
    CHECK_THROWS_AS(compile_file(kClassroomPath, Dialect::AbacScalar), std::runtime_error);
}
