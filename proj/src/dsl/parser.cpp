#include <set>

#include "aclab/dsl/parser.hpp"

namespace aclab::dsl {

namespace {

class Parser {
  public:
    explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {
        end_.kind = TokenKind::End;
        end_.lexeme = "";
        if (!tokens.empty()) {
            const Token& last = tokens.back();
            end_.line = last.line;
            end_.column = last.column + static_cast<int>(last.lexeme.size());
        }
    }

    PolicyDoc parse_doc() {
        PolicyDoc doc;
        doc.policies.push_back(parse_policy());
        while (!at_end()) doc.policies.push_back(parse_policy());
        std::set<std::string> seen_actions;
        for (const PolicyDef& def : doc.policies) {
            if (!seen_actions.insert(def.action_name).second) {
                throw ParseError("duplicate policy for action " + def.action_name, def.line,
                                 def.column);
            }
        }
        return doc;
    }

  private:
    const std::vector<Token>& tokens_;
    std::size_t pos_ = 0;
    Token end_;

    const Token& peek() const { return pos_ < tokens_.size() ? tokens_[pos_] : end_; }
    const Token& get() {
        const Token& token = peek();
        if (pos_ < tokens_.size()) ++pos_;
        return token;
    }
    bool at_end() const { return pos_ >= tokens_.size(); }

    bool peek_is(TokenKind kind, const char* lexeme = nullptr) const {
        const Token& token = peek();
        return token.kind == kind && (lexeme == nullptr || token.lexeme == lexeme);
    }

    [[noreturn]] void fail_expected(const std::string& expected) const {
        const Token& token = peek();
        std::string got = token.kind == TokenKind::End
                              ? std::string(to_string(TokenKind::End))
                              : "'" + token.lexeme + "'";
        throw ParseError("expected " + expected + ", got " + got, token.line, token.column);
    }

    Token expect(TokenKind kind, const char* lexeme) {
        if (!peek_is(kind, lexeme)) fail_expected("'" + std::string(lexeme) + "'");
        return get();
    }

    Token expect_identifier(const char* what) {
        if (!peek_is(TokenKind::Identifier)) fail_expected(what);
        return get();
    }

    PolicyDef parse_policy() {
        Token keyword = peek();
        expect(TokenKind::Keyword, "policy");
        PolicyDef def;
        def.line = keyword.line;
        def.column = keyword.column;
        def.id = expect_identifier("policy name").lexeme;
        expect(TokenKind::Keyword, "on");
        def.action_name = expect_identifier("action name").lexeme;
        expect(TokenKind::Punct, "{");
        int position = 0;
        while (peek_is(TokenKind::Keyword, "require")) {
            get();
            ++position;
            Requirement req;
            if (peek_is(TokenKind::Identifier) && pos_ + 1 < tokens_.size() &&
                tokens_[pos_ + 1].kind == TokenKind::Punct && tokens_[pos_ + 1].lexeme == ":") {
                req.condition_id = def.id + "." + get().lexeme;
                req.labeled = true;
                get(); // ':'
            } else {
                req.condition_id = def.id + ".c" + std::to_string(position);
                req.labeled = false;
            }
            req.expr = parse_expr();
            expect(TokenKind::Punct, ";");
            def.requirements.push_back(std::move(req));
        }
        expect(TokenKind::Punct, "}");
        return def;
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (peek_is(TokenKind::Keyword, "or")) {
            Token op = get();
            ExprPtr rhs = parse_and();
            lhs = make_expr(OrExpr{std::move(lhs), std::move(rhs)}, op.line, op.column);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_unary();
        while (peek_is(TokenKind::Keyword, "and")) {
            Token op = get();
            ExprPtr rhs = parse_unary();
            lhs = make_expr(AndExpr{std::move(lhs), std::move(rhs)}, op.line, op.column);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (peek_is(TokenKind::Keyword, "not")) {
            Token op = get();
            return make_expr(NotExpr{parse_unary()}, op.line, op.column);
        }
        return parse_atom();
    }

    ExprPtr parse_atom() {
        const Token& token = peek();
        if (peek_is(TokenKind::Keyword, "true") || peek_is(TokenKind::Keyword, "false")) {
            Token lit = get();
            return make_expr(BoolLit{lit.lexeme == "true"}, lit.line, lit.column);
        }
        if (peek_is(TokenKind::Punct, "(")) {
            get();
            ExprPtr inner = parse_expr();
            expect(TokenKind::Punct, ")");
            return inner;
        }
        Operand lhs = parse_operand();
        if (peek_is(TokenKind::Operator)) {
            Token op = get();
            Comparison cmp;
            cmp.lhs = std::move(lhs);
            cmp.op = compare_op(op);
            cmp.rhs = parse_operand();
            return make_expr(std::move(cmp), token.line, token.column);
        }
        return make_expr(BoolTest{std::move(lhs)}, token.line, token.column);
    }

    CompareOp compare_op(const Token& token) const {
        if (token.lexeme == "=") return CompareOp::Eq;
        if (token.lexeme == "!=") return CompareOp::Ne;
        if (token.lexeme == "<") return CompareOp::Lt;
        if (token.lexeme == "<=") return CompareOp::Le;
        if (token.lexeme == ">") return CompareOp::Gt;
        return CompareOp::Ge;
    }

    Operand parse_operand() {
        const Token& token = peek();
        Operand operand;
        operand.line = token.line;
        operand.column = token.column;
        if (token.kind == TokenKind::Integer) {
            operand.kind = Operand::Kind::IntLit;
            operand.int_value = std::stoll(get().lexeme);
            return operand;
        }
        if (token.kind != TokenKind::Identifier) {
            fail_expected("integer or attribute path");
        }
        std::string head = get().lexeme;
        if (peek_is(TokenKind::Punct, "(")) {
            get();
            operand.kind = Operand::Kind::Call;
            operand.callee = std::move(head);
            if (!peek_is(TokenKind::Punct, ")")) {
                operand.args.push_back(expect_identifier("argument name").lexeme);
                while (peek_is(TokenKind::Punct, ",")) {
                    get();
                    operand.args.push_back(expect_identifier("argument name").lexeme);
                }
            }
            expect(TokenKind::Punct, ")");
            return operand;
        }
        operand.kind = Operand::Kind::Path;
        operand.path.push_back(std::move(head));
        while (peek_is(TokenKind::Punct, ".")) {
            get();
            operand.path.push_back(expect_identifier("attribute name").lexeme);
        }
        return operand;
    }
};

} // namespace

PolicyDoc parse(const std::vector<Token>& tokens) { return Parser(tokens).parse_doc(); }

PolicyDoc parse_text(const std::string& source) { return parse(tokenize(source)); }

} // namespace aclab::dsl
