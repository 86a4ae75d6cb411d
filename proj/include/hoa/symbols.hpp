#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>

#include "rational.hpp"

namespace hoa {

/// Product of named real symbols raised to integer powers (g^2 t^2, ...).
/// Zero exponents are never stored, so map equality is monomial equality.
struct SymbolMonomial {
    std::map<std::string, int> powers;

    static SymbolMonomial unit() { return {}; }
    static SymbolMonomial of(const std::string& name, int exp = 1) {
        SymbolMonomial m;
        if (exp != 0) m.powers[name] = exp;
        return m;
    }

    int exponent(const std::string& name) const {
        auto it = powers.find(name);
        return it == powers.end() ? 0 : it->second;
    }

    SymbolMonomial& operator*=(const SymbolMonomial& o) {
        for (const auto& [name, exp] : o.powers) {
            int e = (powers[name] += exp);
            if (e == 0) powers.erase(name);
        }
        return *this;
    }
    friend SymbolMonomial operator*(SymbolMonomial a, const SymbolMonomial& b) { return a *= b; }

    friend bool operator==(const SymbolMonomial&, const SymbolMonomial&) = default;
    friend auto operator<=>(const SymbolMonomial& a, const SymbolMonomial& b) {
        return a.powers <=> b.powers;
    }

    std::string str() const {
        std::string s;
        for (const auto& [name, exp] : powers) {
            if (!s.empty()) s += " ";
            s += name;
            if (exp != 1) s += "^" + std::to_string(exp);
        }
        return s;
    }
};

/// Numeric binding for every symbol appearing in an expression.
struct Substitution {
    std::map<std::string, double> values;

    double value_of(const std::string& name) const {
        auto it = values.find(name);
        if (it == values.end())
            throw std::invalid_argument("unbound symbol in substitution: " + name);
        return it->second;
    }

    double eval(const SymbolMonomial& m) const {
        double v = 1.0;
        for (const auto& [name, exp] : m.powers) {
            double base = value_of(name);
            v *= std::pow(base, exp);
        }
        return v;
    }
};

/// One exact term: Gaussian rational times a symbol monomial.
struct ScalarCoeff {
    GaussianRational value;
    SymbolMonomial symbols;

    std::complex<double> eval(const Substitution& s) const {
        return value.to_complex() * s.eval(symbols);
    }
};

/// Exact polynomial in the declared scalar symbols, stored canonically as
/// monomial -> coefficient with no zero entries.
struct SymbolPoly {
    std::map<SymbolMonomial, GaussianRational> terms;

    static SymbolPoly constant(GaussianRational c) {
        SymbolPoly p;
        if (!c.is_zero()) p.terms.emplace(SymbolMonomial::unit(), std::move(c));
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    void add_term(const SymbolMonomial& m, const GaussianRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    SymbolPoly& operator+=(const SymbolPoly& o) {
        for (const auto& [m, c] : o.terms) add_term(m, c);
        return *this;
    }

    friend bool operator==(const SymbolPoly&, const SymbolPoly&) = default;

    std::complex<double> eval(const Substitution& s) const {
        std::complex<double> v{0.0, 0.0};
        for (const auto& [m, c] : terms) v += c.to_complex() * s.eval(m);
        return v;
    }
};

}  // namespace hoa
