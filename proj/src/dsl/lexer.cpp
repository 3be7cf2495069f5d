#include <cctype>

#include "aclab/dsl/parser.hpp"

namespace aclab::dsl {

namespace {

bool is_keyword(const std::string& word) {
    return word == "policy" || word == "on" || word == "require" || word == "and" ||
           word == "or" || word == "not" || word == "true" || word == "false";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

} // namespace

std::vector<Token> tokenize(const std::string& source) {
    std::vector<Token> tokens;
    int line = 1;
    int column = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (source[i + k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        i += n;
    };
    while (i < source.size()) {
        char c = source[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < source.size() && source[i] != '\n') advance(1);
            continue;
        }
        Token token;
        token.line = line;
        token.column = column;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < source.size() && ident_char(source[j])) ++j;
            token.lexeme = source.substr(i, j - i);
            token.kind = is_keyword(token.lexeme) ? TokenKind::Keyword : TokenKind::Identifier;
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < source.size() && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
            token.kind = TokenKind::Integer;
            token.lexeme = source.substr(i, j - i);
            advance(j - i);
        } else if (c == '!' ) {
            if (i + 1 < source.size() && source[i + 1] == '=') {
                token.kind = TokenKind::Operator;
                token.lexeme = "!=";
                advance(2);
            } else {
                throw ParseError("illegal character '!'", line, column);
            }
        } else if (c == '<' || c == '>') {
            token.kind = TokenKind::Operator;
            if (i + 1 < source.size() && source[i + 1] == '=') {
                token.lexeme = std::string(1, c) + "=";
                advance(2);
            } else {
                token.lexeme = std::string(1, c);
                advance(1);
            }
        } else if (c == '=') {
            token.kind = TokenKind::Operator;
            token.lexeme = "=";
            advance(1);
        } else if (c == '{' || c == '}' || c == '(' || c == ')' || c == ';' || c == ':' ||
                   c == ',' || c == '.') {
            token.kind = TokenKind::Punct;
            token.lexeme = std::string(1, c);
            advance(1);
        } else {
            throw ParseError("illegal character '" + std::string(1, c) + "'", line, column);
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

} // namespace aclab::dsl
