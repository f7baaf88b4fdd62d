#pragma once

#include <string>
#include <vector>

#include "ftscert/polynomial.hpp"
#include "ftscert/signed_power.hpp"
#include "ftscert/util.hpp"

namespace ftscert {

// Parses a vector-field component over the given state names into a signed
// power expression. Grammar: + - * / with the usual precedence, unary minus,
// ^ with a literal rational exponent, sign(x_i), abs(x_i), parentheses,
// decimal and rational number literals. x^(a/b) with odd b denotes
// sign(x)^a*|x|^(a/b); even b requires the base to be wrapped in abs().
// Division is only defined by single-term expressions, and the final
// expression must not carry negative exponents. Throws ParseError.
SignedPowerExpr parse_expression(const std::string& text,
                                 const std::vector<std::string>& states);

// parse_expression followed by conversion to an honest polynomial; used for
// domain constraints. Throws ParseError when the text is not polynomial.
Polynomial parse_polynomial(const std::string& text,
                            const std::vector<std::string>& states);

// Canonical text form that parse_expression reads back to an equal expression.
std::string print_expression(const SignedPowerExpr& e,
                             const std::vector<std::string>& states);

std::string print_polynomial(const Polynomial& p,
                             const std::vector<std::string>& states);

}  // namespace ftscert
