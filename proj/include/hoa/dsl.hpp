#pragma once

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "system.hpp"

namespace hoa {

/// Positioned parse/validation error for DSL sources.
struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error("line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ": " + msg),
          line(line_),
          column(col_) {}
};

namespace dsl_detail {

constexpr int kMaxExponent = 64;

struct Token {
    enum class Kind { Ident, Integer, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        skip_space();
        Token tok;
        tok.line = line_;
        tok.column = col_;
        if (pos_ >= src_.size()) return tok;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok.kind = Token::Kind::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                tok.text += advance();
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            tok.kind = Token::Kind::Integer;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                tok.text += advance();
            if (tok.text.size() > 18)
                throw ParseError("integer literal too large", tok.line, tok.column);
            return tok;
        }
        if (std::string("+-*/^=();,").find(c) != std::string::npos) {
            tok.kind = Token::Kind::Punct;
            tok.text = advance();
            return tok;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

  private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#') {  // comment to end of line
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace dsl_detail

/// Parses the Hamiltonian DSL:
///
///   program := { mode_decl | symbol_decl } "H" "=" sum [";"]
///   mode_decl := "mode" IDENT ( "coherent" "(" IDENT ")" | "vacuum" ) ";"
///   symbol_decl := "symbol" IDENT ";"
///   sum := ["-"] term { ("+"|"-") (term | "hc") }
///   term := factor { "*" factor }
///   factor := INT ["/" INT] | "i" | IDENT ["^" INT]
///
/// Within a term, `X` is the annihilation and `Xd` the creation operator of
/// declared mode X; `g` is always available as the coupling symbol; `hc`
/// appends the Hermitian conjugate of all preceding terms of the sum.
class DslParser {
  public:
    explicit DslParser(const std::string& src) : lexer_(src) { shift(); }

    SystemDef parse(const std::string& system_name = "custom") {
        SystemDef sys;
        sys.name = system_name;
        symbols_.insert("g");
        while (cur_.kind == dsl_detail::Token::Kind::Ident &&
               (cur_.text == "mode" || cur_.text == "symbol")) {
            if (cur_.text == "mode")
                parse_mode_decl(sys);
            else
                parse_symbol_decl();
        }
        expect_ident("H");
        expect_punct("=");
        sys.h_int = parse_sum(sys);
        if (cur_.kind == dsl_detail::Token::Kind::Punct && cur_.text == ";") shift();
        if (cur_.kind != dsl_detail::Token::Kind::End)
            fail("trailing input after Hamiltonian");
        if (!sys.is_hermitian())
            fail("Hamiltonian is not Hermitian; append '+ hc' or add conjugate terms");
        int coherent_count = 0;
        for (const auto& st : sys.initial_states)
            if (st.kind == InitialState::Kind::Coherent) ++coherent_count;
        if (coherent_count > 1) fail("at most one mode may carry a coherent amplitude");
        return sys;
    }

  private:
    void parse_mode_decl(SystemDef& sys) {
        shift();  // "mode"
        std::string label = expect_any_ident("mode label");
        if (sys.find_mode(label)) fail("duplicate mode '" + label + "'");
        int index = static_cast<int>(sys.modes.size());
        sys.modes.push_back({index, label});
        sys.frequency_symbols[index] = "w" + std::to_string(index + 1);
        std::string kind = expect_any_ident("'coherent' or 'vacuum'");
        if (kind == "coherent") {
            expect_punct("(");
            std::string amp = expect_any_ident("amplitude symbol");
            expect_punct(")");
            sys.initial_states.push_back(InitialState::coherent(amp));
        } else if (kind == "vacuum") {
            sys.initial_states.push_back(InitialState::vacuum());
        } else {
            fail("expected 'coherent' or 'vacuum', got '" + kind + "'");
        }
        expect_punct(";");
    }

    void parse_symbol_decl() {
        shift();  // "symbol"
        symbols_.insert(expect_any_ident("symbol name"));
        expect_punct(";");
    }

    OperatorPoly parse_sum(const SystemDef& sys) {
        OperatorPoly sum;
        bool negative = false;
        if (cur_.kind == dsl_detail::Token::Kind::Punct && cur_.text == "-") {
            negative = true;
            shift();
        }
        sum += parse_term(sys, negative);
        while (cur_.kind == dsl_detail::Token::Kind::Punct &&
               (cur_.text == "+" || cur_.text == "-")) {
            negative = cur_.text == "-";
            shift();
            if (cur_.kind == dsl_detail::Token::Kind::Ident && cur_.text == "hc") {
                if (negative) fail("'- hc' is not supported");
                shift();
                sum += sum.dagger();
            } else {
                sum += parse_term(sys, negative);
            }
        }
        return sum;
    }

    OperatorPoly parse_term(const SystemDef& sys, bool negative) {
        RawProduct raw;
        if (negative) raw.coeff = -raw.coeff;
        parse_factor(sys, raw);
        while (cur_.kind == dsl_detail::Token::Kind::Punct && cur_.text == "*") {
            shift();
            parse_factor(sys, raw);
        }
        return normal_order(raw);
    }

    void parse_factor(const SystemDef& sys, RawProduct& raw) {
        if (cur_.kind == dsl_detail::Token::Kind::Integer) {
            Rational num(boost::multiprecision::cpp_int(cur_.text));
            shift();
            if (cur_.kind == dsl_detail::Token::Kind::Punct && cur_.text == "/") {
                shift();
                if (cur_.kind != dsl_detail::Token::Kind::Integer)
                    fail("expected denominator after '/'");
                boost::multiprecision::cpp_int den(cur_.text);
                if (den == 0) fail("zero denominator");
                num /= Rational(den);
                shift();
            }
            raw.coeff *= GaussianRational(num);
            return;
        }
        if (cur_.kind != dsl_detail::Token::Kind::Ident)
            fail("expected operator, symbol or number, got '" + cur_.text + "'");
        std::string name = cur_.text;
        int line = cur_.line, col = cur_.column;
        shift();
        int exp = 1;
        if (cur_.kind == dsl_detail::Token::Kind::Punct && cur_.text == "^") {
            shift();
            if (cur_.kind != dsl_detail::Token::Kind::Integer)
                fail("expected integer exponent after '^'");
            exp = std::stoi(cur_.text);
            if (exp < 0 || exp > dsl_detail::kMaxExponent)
                throw ParseError("exponent out of range (max " +
                                     std::to_string(dsl_detail::kMaxExponent) + ")",
                                 cur_.line, cur_.column);
            shift();
        }

        if (name == "i") {
            GaussianRational f = GaussianRational::one();
            for (int j = 0; j < exp; ++j) f *= GaussianRational::i();
            raw.coeff *= f;
            return;
        }
        if (auto mode = sys.find_mode(name)) {
            for (int j = 0; j < exp; ++j) raw.factors.push_back({*mode, false});
            return;
        }
        if (name.size() > 1 && name.back() == 'd') {
            if (auto mode = sys.find_mode(name.substr(0, name.size() - 1))) {
                for (int j = 0; j < exp; ++j) raw.factors.push_back({*mode, true});
                return;
            }
        }
        if (symbols_.count(name)) {
            raw.symbols *= SymbolMonomial::of(name, exp);
            return;
        }
        throw ParseError("undeclared mode '" + name + "'", line, col);
    }

    void shift() { cur_ = lexer_.next(); }

    void expect_punct(const std::string& p) {
        if (cur_.kind != dsl_detail::Token::Kind::Punct || cur_.text != p)
            fail("expected '" + p + "', got '" + cur_.text + "'");
        shift();
    }

    void expect_ident(const std::string& name) {
        if (cur_.kind != dsl_detail::Token::Kind::Ident || cur_.text != name)
            fail("expected '" + name + "', got '" + cur_.text + "'");
        shift();
    }

    std::string expect_any_ident(const std::string& what) {
        if (cur_.kind != dsl_detail::Token::Kind::Ident)
            fail("expected " + what + ", got '" + cur_.text + "'");
        std::string s = cur_.text;
        shift();
        return s;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur_.line, cur_.column);
    }

    dsl_detail::Lexer lexer_;
    dsl_detail::Token cur_;
    std::set<std::string> symbols_;
};

inline SystemDef parse_system(const std::string& src, const std::string& name = "custom") {
    return DslParser(src).parse(name);
}

/// Renders a SystemDef back to DSL text; parse(render(sys)) reproduces the
/// system exactly. Complex coefficients are split into a rational term and
/// an `i`-weighted term, which the sum grammar expresses directly.
inline std::string render_system(const SystemDef& sys) {
    std::string out;
    for (std::size_t m = 0; m < sys.modes.size(); ++m) {
        out += "mode " + sys.modes[m].label + " ";
        const auto& init = sys.initial_states[m];
        if (init.kind == InitialState::Kind::Coherent)
            out += "coherent(" + init.amplitude_symbol + ")";
        else
            out += "vacuum";
        out += ";\n";
    }
    std::set<std::string> declared{"g"};
    for (const auto& [key, coeff] : sys.h_int.terms())
        for (const auto& [name, exp] : key.second.powers)
            if (declared.insert(name).second) out += "symbol " + name + ";\n";

    auto render_part = [&](const Rational& value, bool imaginary, const OperatorPoly::Key& key,
                           bool& first) {
        if (value == 0) return;
        Rational a = value < 0 ? Rational(-value) : value;
        if (first) {
            if (value < 0) out += "-";
            first = false;
        } else {
            out += value < 0 ? " - " : " + ";
        }
        std::string factors = rational_str(a);
        if (imaginary) factors += "*i";
        for (const auto& [name, exp] : key.second.powers) {
            factors += "*" + name;
            if (exp != 1) factors += "^" + std::to_string(exp);
        }
        for (const auto& f : key.first.factors) {
            const std::string& label = sys.modes[static_cast<std::size_t>(f.mode)].label;
            if (f.cr > 0) {
                factors += "*" + label + "d";
                if (f.cr > 1) factors += "^" + std::to_string(f.cr);
            }
            if (f.an > 0) {
                factors += "*" + label;
                if (f.an > 1) factors += "^" + std::to_string(f.an);
            }
        }
        out += factors;
    };

    out += "H = ";
    bool first = true;
    for (const auto& [key, coeff] : sys.h_int.terms()) {
        render_part(coeff.re, false, key, first);
        render_part(coeff.im, true, key, first);
    }
    if (first) out += "0*g";
    out += ";\n";
    return out;
}

}  // namespace hoa
