#include <map>
#include <set>

#include "aclab/dsl/validate.hpp"

namespace aclab::dsl {

namespace {

enum class ValueType { Bool, Int, Str };

struct BuiltinSig {
    ValueType result;
    std::vector<std::string> args;
};

const std::map<std::string, BuiltinSig>& builtin_signatures() {
    static const std::map<std::string, BuiltinSig> sigs = {
        {"review_count", {ValueType::Int, {"resource"}}},
        {"has_reviewed", {ValueType::Bool, {"requester", "resource"}}},
        {"grade_creator", {ValueType::Str, {"resource"}}},
        {"already_appended", {ValueType::Bool, {"resource"}}},
        {"same_homework", {ValueType::Bool, {"resource", "grade"}}},
    };
    return sigs;
}

// Scalar attributes visible per resource type. For reviews and grades,
// graded/homework describe the owning homework.
const std::map<std::string, ValueType>* attribute_table(ResourceType type) {
    static const std::map<std::string, ValueType> homework = {
        {"author", ValueType::Str},
        {"submitted", ValueType::Bool},
        {"graded", ValueType::Bool},
    };
    static const std::map<std::string, ValueType> review = {
        {"creator", ValueType::Str},
        {"graded", ValueType::Bool},
        {"homework", ValueType::Str},
    };
    static const std::map<std::string, ValueType> grade = {
        {"creator", ValueType::Str},
        {"homework", ValueType::Str},
    };
    switch (type) {
        case ResourceType::Homework: return &homework;
        case ResourceType::Review: return &review;
        case ResourceType::Grade: return &grade;
    }
    return &homework;
}

const char* plural_name(ResourceType type) {
    switch (type) {
        case ResourceType::Homework: return "homeworks";
        case ResourceType::Review: return "reviews";
        case ResourceType::Grade: return "grades";
    }
    return "?";
}

std::string join_path(const std::vector<std::string>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) out += ".";
        out += path[i];
    }
    return out;
}

class Checker {
  public:
    Checker(ResourceType resource_type, Dialect dialect, std::vector<SemanticError>& errors)
        : resource_type_(resource_type), dialect_(dialect), errors_(errors) {}

    // Reports every problem found; the returned type defaults to Bool
    // after an error so one mistake does not cascade.
    ValueType check_expr(const Expr& expr) {
        struct Visitor {
            Checker& self;
            const Expr& expr;
            ValueType operator()(const BoolLit&) const { return ValueType::Bool; }
            ValueType operator()(const Comparison& cmp) const {
                auto lhs = self.check_operand(cmp.lhs);
                auto rhs = self.check_operand(cmp.rhs);
                if (lhs && rhs) {
                    bool ordering = cmp.op != CompareOp::Eq && cmp.op != CompareOp::Ne;
                    if (ordering && (*lhs != ValueType::Int || *rhs != ValueType::Int)) {
                        self.report("ordering comparison requires integer operands", expr);
                    } else if (*lhs != *rhs) {
                        self.report("comparison operands have mismatched types", expr);
                    }
                }
                return ValueType::Bool;
            }
            ValueType operator()(const BoolTest& test) const {
                auto type = self.check_operand(test.operand);
                if (type && *type != ValueType::Bool) {
                    self.report("requirement is not boolean", expr);
                }
                return ValueType::Bool;
            }
            ValueType operator()(const NotExpr& e) const {
                self.check_expr(*e.inner);
                return ValueType::Bool;
            }
            ValueType operator()(const AndExpr& e) const {
                self.check_expr(*e.lhs);
                self.check_expr(*e.rhs);
                return ValueType::Bool;
            }
            ValueType operator()(const OrExpr& e) const {
                self.check_expr(*e.lhs);
                self.check_expr(*e.rhs);
                return ValueType::Bool;
            }
        };
        return std::visit(Visitor{*this, expr}, expr.node);
    }

  private:
    ResourceType resource_type_;
    Dialect dialect_;
    std::vector<SemanticError>& errors_;

    void report(std::string message, const Expr& at) {
        errors_.push_back({std::move(message), at.line, at.column});
    }
    void report(std::string message, const Operand& at) {
        errors_.push_back({std::move(message), at.line, at.column});
    }

    std::optional<ValueType> check_operand(const Operand& operand) {
        switch (operand.kind) {
            case Operand::Kind::IntLit:
                return ValueType::Int;
            case Operand::Kind::Path:
                return check_path(operand);
            case Operand::Kind::Call:
                return check_call(operand);
        }
        return std::nullopt;
    }

    std::optional<ValueType> check_path(const Operand& operand) {
        const auto& path = operand.path;
        if (path[0] == "requester") {
            if (path.size() > 1) {
                report("requester has no attributes", operand);
                return std::nullopt;
            }
            return ValueType::Str;
        }
        if (path[0] != "resource") {
            report("unknown identifier " + path[0], operand);
            return std::nullopt;
        }
        if (path.size() == 1) {
            report("resource requires an attribute", operand);
            return std::nullopt;
        }
        if (path.size() > 2) {
            report("unknown attribute path " + join_path(path), operand);
            return std::nullopt;
        }
        const auto* table = attribute_table(resource_type_);
        auto it = table->find(path[1]);
        if (it == table->end()) {
            report(std::string(plural_name(resource_type_)) + " have no attribute " + path[1],
                   operand);
            return std::nullopt;
        }
        if (dialect_ == Dialect::AbacScalar && path[1] == "homework") {
            report("resource.homework is outside the attribute dialect", operand);
            return std::nullopt;
        }
        return it->second;
    }

    std::optional<ValueType> check_call(const Operand& operand) {
        auto it = builtin_signatures().find(operand.callee);
        if (it == builtin_signatures().end()) {
            report("unknown builtin " + operand.callee, operand);
            return std::nullopt;
        }
        if (dialect_ == Dialect::AbacScalar) {
            report("builtin " + operand.callee + " is outside the attribute dialect", operand);
            return std::nullopt;
        }
        const BuiltinSig& sig = it->second;
        if (operand.args.size() != sig.args.size()) {
            report("builtin " + operand.callee + " expects " +
                       std::to_string(sig.args.size()) + " arguments, got " +
                       std::to_string(operand.args.size()),
                   operand);
            return std::nullopt;
        }
        for (std::size_t i = 0; i < sig.args.size(); ++i) {
            if (operand.args[i] != sig.args[i]) {
                report("builtin " + operand.callee + " argument " + std::to_string(i + 1) +
                           " must be " + sig.args[i],
                       operand);
                return std::nullopt;
            }
        }
        return sig.result;
    }
};

} // namespace

ValidationResult validate(const PolicyDoc& doc, Dialect dialect) {
    ValidationResult result;
    result.validated.doc = doc;
    for (PolicyDef& def : result.validated.doc.policies) {
        auto action = action_from_string(def.action_name);
        if (!action) {
            result.errors.push_back(
                {"unknown action " + def.action_name, def.line, def.column});
            continue;
        }
        def.action = *action;
        Checker checker(resource_type_for(*action), dialect, result.errors);
        std::set<std::string> seen_ids;
        for (const Requirement& req : def.requirements) {
            if (!seen_ids.insert(req.condition_id).second) {
                result.errors.push_back({"duplicate condition id " + req.condition_id,
                                         req.expr->line, req.expr->column});
            }
            checker.check_expr(*req.expr);
        }
    }
    return result;
}

} // namespace aclab::dsl
