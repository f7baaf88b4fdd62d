#include "ftscert/parse.hpp"

#include <cctype>
#include <stdexcept>

namespace ftscert {

namespace {

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Lexer {
    const std::string& text;
    size_t pos = 0;
    int line = 1, col = 1;

    Tok kind = Tok::End;
    std::string value;
    int tok_line = 1, tok_col = 1;

    explicit Lexer(const std::string& t) : text(t) { advance(); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_line, tok_col); }

    void bump() {
        if (pos < text.size() && text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void advance() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) bump();
        tok_line = line;
        tok_col = col;
        value.clear();
        if (pos >= text.size()) {
            kind = Tok::End;
            return;
        }
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            kind = Tok::Num;
            while (pos < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.')) {
                value += text[pos];
                bump();
            }
            // exponent suffix like 5.1188e-7
            if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
                size_t look = pos + 1;
                if (look < text.size() && (text[look] == '+' || text[look] == '-')) ++look;
                if (look < text.size() && std::isdigit(static_cast<unsigned char>(text[look]))) {
                    while (pos < look) {
                        value += text[pos];
                        bump();
                    }
                    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                        value += text[pos];
                        bump();
                    }
                }
            }
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            kind = Tok::Ident;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
                value += text[pos];
                bump();
            }
            return;
        }
        switch (c) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '^': kind = Tok::Caret; break;
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            default: fail(std::string("unexpected character '") + c + "'");
        }
        bump();
    }
};

struct Parser {
    Lexer lex;
    const std::vector<std::string>& states;

    Parser(const std::string& text, const std::vector<std::string>& names)
        : lex(text), states(names) {}

    int nvars() const { return static_cast<int>(states.size()); }

    void expect(Tok k, const char* what) {
        if (lex.kind != k) lex.fail(std::string("expected ") + what);
        lex.advance();
    }

    int state_index(const std::string& name) { return state_index(name, lex.tok_line, lex.tok_col); }

    int state_index(const std::string& name, int at_line, int at_col) {
        for (size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return static_cast<int>(i);
        throw ParseError("unknown variable '" + name + "'", at_line, at_col);
    }

    SignedPowerExpr parse() {
        SignedPowerExpr e = expr();
        if (lex.kind != Tok::End) {
            if (lex.kind == Tok::Ident || lex.kind == Tok::Num || lex.kind == Tok::LParen)
                lex.fail("implicit multiplication is not supported; write '*'");
            lex.fail("trailing input after expression");
        }
        if (e.has_negative_exponent())
            lex.fail("expression has a negative exponent on a state variable");
        return e;
    }

    SignedPowerExpr expr() {
        SignedPowerExpr acc = term();
        while (lex.kind == Tok::Plus || lex.kind == Tok::Minus) {
            bool minus = lex.kind == Tok::Minus;
            lex.advance();
            SignedPowerExpr rhs = term();
            acc = minus ? spe_sub(acc, rhs) : spe_add(acc, rhs);
        }
        return acc;
    }

    SignedPowerExpr term() {
        SignedPowerExpr acc = unary();
        while (lex.kind == Tok::Star || lex.kind == Tok::Slash) {
            bool divide = lex.kind == Tok::Slash;
            lex.advance();
            SignedPowerExpr rhs = unary();
            acc = divide ? spe_mul(acc, invert(rhs)) : spe_mul(acc, rhs);
        }
        return acc;
    }

    SignedPowerExpr invert(const SignedPowerExpr& e) {
        if (e.terms().size() != 1)
            lex.fail(e.is_zero() ? "division by zero"
                                 : "division is only defined by single-term expressions");
        const SignedPowerTerm& t = e.terms()[0];
        std::vector<Rational> exps = t.exps;
        for (auto& ex : exps) ex = -ex;
        return SignedPowerExpr::make_term(e.nvars(), Rational(1) / t.coeff, t.sigma, exps);
    }

    SignedPowerExpr unary() {
        if (lex.kind == Tok::Minus) {
            lex.advance();
            return spe_neg(unary());
        }
        if (lex.kind == Tok::Plus) {
            lex.advance();
            return unary();
        }
        return power();
    }

    SignedPowerExpr power() {
        SignedPowerExpr base = primary();
        if (lex.kind != Tok::Caret) return base;
        lex.advance();
        Rational e = exponent_literal();
        return apply_power(base, e);
    }

    Rational exponent_literal() {
        bool neg = false;
        bool parens = false;
        if (lex.kind == Tok::LParen) {
            parens = true;
            lex.advance();
            if (lex.kind == Tok::Minus) {
                neg = true;
                lex.advance();
            } else if (lex.kind == Tok::Plus) {
                lex.advance();
            }
        }
        if (lex.kind != Tok::Num) lex.fail("exponent must be a literal rational");
        Rational num = rat_from_string(lex.value);
        lex.advance();
        if (parens && lex.kind == Tok::Slash) {
            lex.advance();
            if (lex.kind != Tok::Num) lex.fail("expected denominator after '/'");
            Rational den = rat_from_string(lex.value);
            lex.advance();
            if (den == 0) lex.fail("zero denominator in exponent");
            num /= den;
        }
        if (parens) expect(Tok::RParen, "')' after exponent");
        return neg ? Rational(-num) : num;
    }

    SignedPowerExpr apply_power(const SignedPowerExpr& base, const Rational& e) {
        if (rat_is_integer(e) && e >= 0) {
            long k = rat_to_long(e);
            SignedPowerExpr acc = SignedPowerExpr::constant(base.nvars(), Rational(1));
            for (long i = 0; i < k; ++i) acc = spe_mul(acc, base);
            return acc;
        }
        if (base.terms().size() != 1)
            lex.fail("fractional or negative powers need a single-term base");
        const SignedPowerTerm& t = base.terms()[0];

        Rational coeff(1);
        if (t.coeff == 1) {
            coeff = 1;
        } else if (t.coeff == -1) {
            if (rat_den_long(e) % 2 == 0)
                lex.fail("even-denominator power of a negative base");
            // odd root keeps the sign; integer numerator sets the parity
            coeff = (rat_to_long(Rational(e * rat_den_long(e))) % 2 != 0) ? Rational(-1) : Rational(1);
        } else {
            lex.fail("fractional power of a coefficient is not representable");
        }

        std::vector<uint8_t> sigma = t.sigma;
        std::vector<Rational> exps = t.exps;
        long den = rat_den_long(e);
        long num = rat_to_long(Rational(e * den));
        for (int i = 0; i < base.nvars(); ++i) {
            if (sigma[i]) {
                if (den % 2 == 0)
                    lex.fail("even-denominator power of a signed variable; wrap it in abs()");
                sigma[i] = static_cast<uint8_t>(((num % 2) + 2) % 2);
            }
            exps[i] *= e;
        }
        return SignedPowerExpr::make_term(base.nvars(), coeff, std::move(sigma), std::move(exps));
    }

    SignedPowerExpr primary() {
        switch (lex.kind) {
            case Tok::Num: {
                Rational v = rat_from_string(lex.value);
                lex.advance();
                return SignedPowerExpr::constant(nvars(), v);
            }
            case Tok::LParen: {
                lex.advance();
                SignedPowerExpr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident: {
                std::string name = lex.value;
                int at_line = lex.tok_line, at_col = lex.tok_col;
                lex.advance();
                if ((name == "sign" || name == "abs") && lex.kind == Tok::LParen) {
                    lex.advance();
                    if (lex.kind != Tok::Ident)
                        lex.fail(name + "() expects a state variable");
                    int idx = state_index(lex.value);
                    lex.advance();
                    expect(Tok::RParen, "')'");
                    return name == "sign" ? sign_of_var(idx) : SignedPowerExpr::abs_var(nvars(), idx);
                }
                return SignedPowerExpr::variable(nvars(), state_index(name, at_line, at_col));
            }
            default:
                lex.fail("expected a number, variable, or '('");
        }
    }

    SignedPowerExpr sign_of_var(int i) {
        std::vector<uint8_t> sigma(nvars(), 0);
        sigma[i] = 1;
        return SignedPowerExpr::make_term(nvars(), Rational(1), std::move(sigma),
                                          std::vector<Rational>(nvars(), Rational(0)));
    }
};

}  // namespace

SignedPowerExpr parse_expression(const std::string& text,
                                 const std::vector<std::string>& states) {
    Parser p(text, states);
    return p.parse();
}

Polynomial parse_polynomial(const std::string& text,
                            const std::vector<std::string>& states) {
    SignedPowerExpr e = parse_expression(text, states);
    try {
        return e.to_polynomial();
    } catch (const std::domain_error& ex) {
        throw ParseError(std::string("expression is not polynomial: ") + ex.what(), 1, 1);
    }
}

std::string print_expression(const SignedPowerExpr& e,
                             const std::vector<std::string>& states) {
    if (e.has_negative_exponent())
        throw std::domain_error("print_expression: negative exponent");
    return e.str(states);
}

std::string print_polynomial(const Polynomial& p, const std::vector<std::string>& states) {
    return p.str(states);
}

}  // namespace ftscert
