#include <sstream>

#include "aclab/dsl/printer.hpp"

namespace aclab::dsl {

namespace {

// Precedence levels: or = 1, and = 2, not = 3, atoms = 4. A child is
// parenthesized when its level is below the context's, and on the right
// side of a same-level binary node (the grammar is left-associative, so
// right nesting only survives a round trip inside parentheses).
int precedence_of(const Expr& expr) {
    struct Visitor {
        int operator()(const BoolLit&) const { return 4; }
        int operator()(const Comparison&) const { return 4; }
        int operator()(const BoolTest&) const { return 4; }
        int operator()(const NotExpr&) const { return 3; }
        int operator()(const AndExpr&) const { return 2; }
        int operator()(const OrExpr&) const { return 1; }
    };
    return std::visit(Visitor{}, expr.node);
}

void print_operand(std::ostream& out, const Operand& operand) {
    switch (operand.kind) {
        case Operand::Kind::IntLit:
            out << operand.int_value;
            return;
        case Operand::Kind::Path:
            for (std::size_t i = 0; i < operand.path.size(); ++i) {
                if (i > 0) out << '.';
                out << operand.path[i];
            }
            return;
        case Operand::Kind::Call:
            out << operand.callee << '(';
            for (std::size_t i = 0; i < operand.args.size(); ++i) {
                if (i > 0) out << ", ";
                out << operand.args[i];
            }
            out << ')';
            return;
    }
}

void print_expr_at(std::ostream& out, const Expr& expr, int min_level) {
    int level = precedence_of(expr);
    bool parens = level < min_level;
    if (parens) out << '(';
    struct Visitor {
        std::ostream& out;
        int level;
        void operator()(const BoolLit& lit) const { out << (lit.value ? "true" : "false"); }
        void operator()(const Comparison& cmp) const {
            print_operand(out, cmp.lhs);
            out << ' ' << to_string(cmp.op) << ' ';
            print_operand(out, cmp.rhs);
        }
        void operator()(const BoolTest& test) const { print_operand(out, test.operand); }
        void operator()(const NotExpr& e) const {
            out << "not ";
            print_expr_at(out, *e.inner, 3);
        }
        void operator()(const AndExpr& e) const {
            print_expr_at(out, *e.lhs, 2);
            out << " and ";
            print_expr_at(out, *e.rhs, 3);
        }
        void operator()(const OrExpr& e) const {
            print_expr_at(out, *e.lhs, 1);
            out << " or ";
            print_expr_at(out, *e.rhs, 2);
        }
    };
    std::visit(Visitor{out, level}, expr.node);
    if (parens) out << ')';
}

} // namespace

std::string print_expr(const Expr& expr) {
    std::ostringstream out;
    print_expr_at(out, expr, 1);
    return out.str();
}

std::string pretty_print(const PolicyDoc& doc) {
    std::ostringstream out;
    for (std::size_t i = 0; i < doc.policies.size(); ++i) {
        const PolicyDef& def = doc.policies[i];
        if (i > 0) out << '\n';
        out << "policy " << def.id << " on " << def.action_name << " {\n";
        for (const Requirement& req : def.requirements) {
            out << "    require ";
            if (req.labeled) {
                // Stored ids are namespaced "<policy>.<label>"; print the
                // label part.
                std::string label = req.condition_id;
                if (label.rfind(def.id + ".", 0) == 0) label = label.substr(def.id.size() + 1);
                out << label << ": ";
            }
            print_expr_at(out, *req.expr, 1);
            out << ";\n";
        }
        out << "}\n";
    }
    return out.str();
}

} // namespace aclab::dsl
