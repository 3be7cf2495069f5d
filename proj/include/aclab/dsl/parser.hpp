#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "aclab/dsl/ast.hpp"

namespace aclab::dsl {

// Lexical or syntax error, positioned 1-based in the source text.
struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(std::string message, int line_, int column_)
        : std::runtime_error(std::move(message)), line(line_), column(column_) {}
};

// Splits source into tokens. '#' starts a comment running to end of line.
// Throws ParseError on an illegal character.
std::vector<Token> tokenize(const std::string& source);

// Recursive-descent parse of a token stream. Throws ParseError on an
// unexpected token (message lists what was expected) and on a duplicate
// policy for the same action name.
PolicyDoc parse(const std::vector<Token>& tokens);

// tokenize + parse.
PolicyDoc parse_text(const std::string& source);

} // namespace aclab::dsl
