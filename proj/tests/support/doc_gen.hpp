#pragma once

#include <string>
#include <vector>

#include "aclab/dsl/ast.hpp"
#include "aclab/rng.hpp"

// Random AST builder for the parse/pretty-print round-trip property.
// Documents are syntactically valid but intentionally not restricted to
// semantically valid programs.
namespace aclab::testsupport {

inline const std::vector<std::string>& ident_pool() {
    static const std::vector<std::string> pool = {
        "requester", "resource", "grade",  "author", "creator", "submitted",
        "graded",    "homework", "review", "count",  "alpha",   "beta",
        "gamma",     "x1",       "y2",     "flag",
    };
    return pool;
}

inline std::string random_ident(Rng& rng) {
    return ident_pool()[rng.bounded(ident_pool().size())];
}

inline dsl::Operand random_operand(Rng& rng) {
    dsl::Operand operand;
    switch (rng.bounded(3)) {
        case 0:
            operand.kind = dsl::Operand::Kind::IntLit;
            operand.int_value = static_cast<long long>(rng.bounded(10));
            break;
        case 1: {
            operand.kind = dsl::Operand::Kind::Path;
            std::size_t segments = 1 + rng.bounded(3);
            for (std::size_t i = 0; i < segments; ++i) {
                operand.path.push_back(random_ident(rng));
            }
            break;
        }
        default: {
            operand.kind = dsl::Operand::Kind::Call;
            operand.callee = random_ident(rng);
            std::size_t args = rng.bounded(4);
            for (std::size_t i = 0; i < args; ++i) {
                operand.args.push_back(random_ident(rng));
            }
            break;
        }
    }
    return operand;
}

inline dsl::ExprPtr random_expr(Rng& rng, int depth) {
    using namespace dsl;
    int pick = depth <= 0 ? static_cast<int>(rng.bounded(3))
                          : static_cast<int>(rng.bounded(6));
    switch (pick) {
        case 0:
            return make_expr(BoolLit{rng.bernoulli(0.5)}, 0, 0);
        case 1: {
            Comparison cmp;
            cmp.lhs = random_operand(rng);
            cmp.op = static_cast<CompareOp>(rng.bounded(6));
            cmp.rhs = random_operand(rng);
            return make_expr(std::move(cmp), 0, 0);
        }
        case 2:
            return make_expr(BoolTest{random_operand(rng)}, 0, 0);
        case 3:
            return make_expr(NotExpr{random_expr(rng, depth - 1)}, 0, 0);
        case 4:
            return make_expr(AndExpr{random_expr(rng, depth - 1), random_expr(rng, depth - 1)},
                             0, 0);
        default:
            return make_expr(OrExpr{random_expr(rng, depth - 1), random_expr(rng, depth - 1)},
                             0, 0);
    }
}

inline dsl::PolicyDoc random_doc(Rng& rng) {
    dsl::PolicyDoc doc;
    std::size_t policies = 1 + rng.bounded(5);
    for (std::size_t p = 0; p < policies; ++p) {
        dsl::PolicyDef def;
        def.id = "Pol" + std::to_string(p + 1);
        // Distinct action names keep the duplicate-policy check quiet.
        def.action_name = "action_" + std::to_string(p + 1);
        std::size_t requirements = rng.bounded(5);
        for (std::size_t r = 0; r < requirements; ++r) {
            dsl::Requirement req;
            req.labeled = rng.bernoulli(0.5);
            if (req.labeled) {
                req.condition_id =
                    def.id + "." + random_ident(rng) + std::to_string(r + 1);
            } else {
                req.condition_id = def.id + ".c" + std::to_string(r + 1);
            }
            req.expr = random_expr(rng, 3);
            def.requirements.push_back(std::move(req));
        }
        doc.policies.push_back(std::move(def));
    }
    return doc;
}

} // namespace aclab::testsupport
