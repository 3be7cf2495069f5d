#include "aclab/dsl/ast.hpp"

namespace aclab::dsl {

const char* to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Integer: return "integer";
        case TokenKind::Operator: return "operator";
        case TokenKind::Punct: return "punct";
        case TokenKind::End: return "end of input";
    }
    return "?";
}

const char* to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

ExprPtr make_expr(std::variant<BoolLit, Comparison, BoolTest, NotExpr, AndExpr, OrExpr> node,
                  int line, int column) {
    auto expr = std::make_shared<Expr>();
    expr->node = std::move(node);
    expr->line = line;
    expr->column = column;
    return expr;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    struct Visitor {
        const Expr& other;
        bool operator()(const BoolLit& lit) const {
            return lit.value == std::get<BoolLit>(other.node).value;
        }
        bool operator()(const Comparison& cmp) const {
            const auto& o = std::get<Comparison>(other.node);
            return cmp.op == o.op && cmp.lhs == o.lhs && cmp.rhs == o.rhs;
        }
        bool operator()(const BoolTest& test) const {
            return test.operand == std::get<BoolTest>(other.node).operand;
        }
        bool operator()(const NotExpr& e) const {
            return expr_equal(*e.inner, *std::get<NotExpr>(other.node).inner);
        }
        bool operator()(const AndExpr& e) const {
            const auto& o = std::get<AndExpr>(other.node);
            return expr_equal(*e.lhs, *o.lhs) && expr_equal(*e.rhs, *o.rhs);
        }
        bool operator()(const OrExpr& e) const {
            const auto& o = std::get<OrExpr>(other.node);
            return expr_equal(*e.lhs, *o.lhs) && expr_equal(*e.rhs, *o.rhs);
        }
    };
    return std::visit(Visitor{b}, a.node);
}

bool doc_equal(const PolicyDoc& a, const PolicyDoc& b) {
    if (a.policies.size() != b.policies.size()) return false;
    for (std::size_t i = 0; i < a.policies.size(); ++i) {
        const PolicyDef& pa = a.policies[i];
        const PolicyDef& pb = b.policies[i];
        if (pa.id != pb.id || pa.action_name != pb.action_name) return false;
        if (pa.requirements.size() != pb.requirements.size()) return false;
        for (std::size_t k = 0; k < pa.requirements.size(); ++k) {
            const Requirement& ra = pa.requirements[k];
            const Requirement& rb = pb.requirements[k];
            if (ra.condition_id != rb.condition_id || ra.labeled != rb.labeled) return false;
            if (!expr_equal(*ra.expr, *rb.expr)) return false;
        }
    }
    return true;
}

} // namespace aclab::dsl
