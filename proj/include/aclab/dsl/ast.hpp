#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "aclab/action.hpp"

namespace aclab::dsl {

enum class TokenKind { Keyword, Identifier, Integer, Operator, Punct, End };

const char* to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::End;
    std::string lexeme;
    int line = 1;   // 1-based
    int column = 1; // 1-based

    bool operator==(const Token&) const = default;
};

// Scalar operand of a comparison or bare boolean test.
//   IntLit      42
//   Path        requester | resource.author | resource.submitted | ...
//   Call        review_count(resource) | has_reviewed(requester, resource) | ...
struct Operand {
    enum class Kind { IntLit, Path, Call } kind = Kind::IntLit;
    long long int_value = 0;
    std::vector<std::string> path;      // Path: segments, e.g. {"resource","author"}
    std::string callee;                 // Call
    std::vector<std::string> args;      // Call: argument names
    int line = 1;
    int column = 1;

    bool operator==(const Operand& other) const {
        if (kind != other.kind) return false;
        switch (kind) {
            case Kind::IntLit: return int_value == other.int_value;
            case Kind::Path: return path == other.path;
            case Kind::Call: return callee == other.callee && args == other.args;
        }
        return false;
    }
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

const char* to_string(CompareOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct BoolLit {
    bool value = false;
};
struct Comparison {
    Operand lhs;
    CompareOp op = CompareOp::Eq;
    Operand rhs;
};
// A boolean-valued operand used directly, e.g. `resource.submitted` or
// `already_appended(resource)`.
struct BoolTest {
    Operand operand;
};
struct NotExpr {
    ExprPtr inner;
};
struct AndExpr {
    ExprPtr lhs;
    ExprPtr rhs;
};
struct OrExpr {
    ExprPtr lhs;
    ExprPtr rhs;
};

struct Expr {
    std::variant<BoolLit, Comparison, BoolTest, NotExpr, AndExpr, OrExpr> node;
    int line = 1;
    int column = 1;
};

bool expr_equal(const Expr& a, const Expr& b);

ExprPtr make_expr(std::variant<BoolLit, Comparison, BoolTest, NotExpr, AndExpr, OrExpr> node,
                  int line = 1, int column = 1);

struct Requirement {
    std::string condition_id; // label, or synthesized "<policy>.c<k>"
    bool labeled = false;     // false when condition_id was synthesized
    ExprPtr expr;
};

struct PolicyDef {
    std::string id;          // e.g. "P4"
    std::string action_name; // identifier as written
    ActionKind action = ActionKind::UploadHomework; // resolved by validate
    std::vector<Requirement> requirements;
    int line = 1;
    int column = 1;
};

struct PolicyDoc {
    std::vector<PolicyDef> policies;
};

bool doc_equal(const PolicyDoc& a, const PolicyDoc& b);

} // namespace aclab::dsl
