#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "aclab/dsl/compile.hpp"
#include "aclab/dsl/parser.hpp"
#include "aclab/oracle.hpp"

namespace aclab::dsl {

namespace {

using Value = std::variant<bool, long long, std::string>;

Value eval_operand(const Operand& operand, const StateSnapshot& snap,
                   const AccessRequest& request) {
    switch (operand.kind) {
        case Operand::Kind::IntLit:
            return operand.int_value;
        case Operand::Kind::Path: {
            const auto& path = operand.path;
            if (path[0] == "requester") return request.user;
            // Validated: path is resource.<attr>.
            const std::string& attr = path[1];
            if (attr == "author" || attr == "creator") return snap.owner;
            if (attr == "submitted") return snap.submitted;
            if (attr == "graded") return snap.graded;
            if (attr == "homework") return snap.homework_id;
            throw std::logic_error("unvalidated attribute path reached evaluation: " + attr);
        }
        case Operand::Kind::Call: {
            const std::string& callee = operand.callee;
            if (callee == "review_count") return static_cast<long long>(snap.review_count);
            if (callee == "has_reviewed") {
                return std::find(snap.reviewers.begin(), snap.reviewers.end(), request.user) !=
                       snap.reviewers.end();
            }
            if (callee == "grade_creator") return snap.grade_creator;
            if (callee == "already_appended") return snap.already_appended;
            if (callee == "same_homework") return snap.homework_graded;
            throw std::logic_error("unvalidated builtin reached evaluation: " + callee);
        }
    }
    throw std::logic_error("unreachable operand kind");
}

bool eval_expr(const Expr& expr, const StateSnapshot& snap, const AccessRequest& request) {
    struct Visitor {
        const StateSnapshot& snap;
        const AccessRequest& request;
        bool operator()(const BoolLit& lit) const { return lit.value; }
        bool operator()(const Comparison& cmp) const {
            Value lhs = eval_operand(cmp.lhs, snap, request);
            Value rhs = eval_operand(cmp.rhs, snap, request);
            if (lhs.index() != rhs.index()) {
                throw std::logic_error("unvalidated comparison reached evaluation");
            }
            switch (cmp.op) {
                case CompareOp::Eq: return lhs == rhs;
                case CompareOp::Ne: return lhs != rhs;
                default: break;
            }
            long long a = std::get<long long>(lhs);
            long long b = std::get<long long>(rhs);
            switch (cmp.op) {
                case CompareOp::Lt: return a < b;
                case CompareOp::Le: return a <= b;
                case CompareOp::Gt: return a > b;
                case CompareOp::Ge: return a >= b;
                default: throw std::logic_error("unreachable comparison op");
            }
        }
        bool operator()(const BoolTest& test) const {
            Value value = eval_operand(test.operand, snap, request);
            return std::get<bool>(value);
        }
        bool operator()(const NotExpr& e) const {
            return !eval_expr(*e.inner, snap, request);
        }
        bool operator()(const AndExpr& e) const {
            bool lhs = eval_expr(*e.lhs, snap, request);
            bool rhs = eval_expr(*e.rhs, snap, request);
            return lhs && rhs;
        }
        bool operator()(const OrExpr& e) const {
            bool lhs = eval_expr(*e.lhs, snap, request);
            bool rhs = eval_expr(*e.rhs, snap, request);
            return lhs || rhs;
        }
    };
    return std::visit(Visitor{snap, request}, expr.node);
}

PolicyId policy_id_from_label(const std::string& label) {
    for (PolicyId policy : {PolicyId::P1, PolicyId::P2, PolicyId::P3, PolicyId::P4,
                            PolicyId::P5, PolicyId::P6, PolicyId::P7}) {
        if (label == to_string(policy)) return policy;
    }
    return PolicyId::NoPolicy;
}

} // namespace

const CompiledPolicy* CompiledPolicySet::find(ActionKind action) const {
    auto it = policies_.find(action);
    return it == policies_.end() ? nullptr : &it->second;
}

Decision CompiledPolicySet::evaluate(const StateSnapshot& snap, const AccessRequest& request,
                                     const ExplanationTemplates& templates) const {
    Decision decision;
    const CompiledPolicy* policy = find(request.action);
    if (policy == nullptr) {
        decision.policy = PolicyId::NoPolicy;
        decision.policy_label = to_string(PolicyId::NoPolicy);
        decision.verdict = Verdict::Deny;
        decision.explanation = render_explanation(decision, request, snap, templates);
        return decision;
    }
    decision.policy_label = policy->policy_id;
    PolicyId mapped = policy_id_from_label(policy->policy_id);
    decision.policy = mapped != PolicyId::NoPolicy ? mapped : policy_for(request.action);
    for (const CompiledCondition& condition : policy->conditions) {
        bool holds;
        if (condition.synthetic_guard) {
            holds = snap.resource_type == to_string(resource_type_for(policy->action));
        } else {
            holds = eval_expr(*condition.expr, snap, request);
        }
        (holds ? decision.satisfied : decision.violated).push_back(condition.id);
    }
    decision.verdict = decision.violated.empty() ? Verdict::Allow : Verdict::Deny;
    decision.explanation = render_explanation(decision, request, snap, templates);
    return decision;
}

Decision CompiledPolicySet::evaluate(const WorldState& state, const AccessRequest& request,
                                     const ExplanationTemplates& templates) const {
    if (!state.has_user(request.user)) {
        throw NotFoundError("unknown user: " + request.user);
    }
    if (request.action == ActionKind::UploadHomework) {
        if (state.has_resource(request.resource)) {
            throw std::invalid_argument("upload target id already exists: " + request.resource);
        }
        return evaluate(upload_snapshot(request.resource, request.user), request, templates);
    }
    return evaluate(snapshot(state, request.resource, request.user), request, templates);
}

CompiledPolicySet compile(const ValidatedDoc& doc) {
    CompiledPolicySet set;
    for (const PolicyDef& def : doc.doc.policies) {
        if (!action_from_string(def.action_name)) {
            throw std::invalid_argument("compile: unvalidated doc (unknown action " +
                                        def.action_name + ")");
        }
        CompiledPolicy compiled;
        compiled.policy_id = def.id;
        compiled.action = def.action;
        if (def.action != ActionKind::UploadHomework) {
            CompiledCondition guard;
            guard.id = def.id + ".resource_is_" +
                       std::string(to_string(resource_type_for(def.action)));
            guard.synthetic_guard = true;
            compiled.conditions.push_back(std::move(guard));
        }
        for (const Requirement& req : def.requirements) {
            compiled.conditions.push_back(CompiledCondition{req.condition_id, req.expr, false});
        }
        set.policies_.emplace(def.action, std::move(compiled));
    }
    return set;
}

CompiledPolicySet compile_text(const std::string& source, Dialect dialect) {
    PolicyDoc doc = parse_text(source);
    ValidationResult result = validate(doc, dialect);
    if (!result.ok()) {
        std::ostringstream message;
        message << "policy validation failed:";
        for (const SemanticError& error : result.errors) {
            message << "\n  " << error.line << ":" << error.column << ": " << error.message;
        }
        throw std::runtime_error(message.str());
    }
    return compile(result.validated);
}

CompiledPolicySet compile_file(const std::string& path, Dialect dialect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open policy file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return compile_text(buf.str(), dialect);
}

} // namespace aclab::dsl
