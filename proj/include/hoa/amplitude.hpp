#pragma once

#include <complex>
#include <map>
#include <string>
#include <utility>

#include "symbols.hpp"

namespace hoa {

/// Exact polynomial in the pump amplitude alpha and its conjugate, with
/// SymbolPoly coefficients in the remaining scalar symbols (g, t, ...).
/// Keys are (power of alpha*, power of alpha).
struct AmplitudePoly {
    using Key = std::pair<int, int>;
    std::map<Key, SymbolPoly> terms;

    static AmplitudePoly zero() { return {}; }

    static AmplitudePoly constant(GaussianRational c) {
        AmplitudePoly p;
        p.add_term(0, 0, SymbolMonomial::unit(), std::move(c));
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    void add_term(int astar_pow, int a_pow, const SymbolMonomial& sym,
                  const GaussianRational& c) {
        if (c.is_zero()) return;
        auto& poly = terms[{astar_pow, a_pow}];
        poly.add_term(sym, c);
        if (poly.is_zero()) terms.erase({astar_pow, a_pow});
    }

    AmplitudePoly& operator+=(const AmplitudePoly& o) {
        for (const auto& [k, p] : o.terms)
            for (const auto& [m, c] : p.terms) add_term(k.first, k.second, m, c);
        return *this;
    }
    AmplitudePoly& operator-=(const AmplitudePoly& o) {
        for (const auto& [k, p] : o.terms)
            for (const auto& [m, c] : p.terms) add_term(k.first, k.second, m, -c);
        return *this;
    }
    friend AmplitudePoly operator+(AmplitudePoly a, const AmplitudePoly& b) { return a += b; }
    friend AmplitudePoly operator-(AmplitudePoly a, const AmplitudePoly& b) { return a -= b; }

    friend AmplitudePoly operator*(const AmplitudePoly& a, const AmplitudePoly& b) {
        AmplitudePoly r;
        for (const auto& [ka, pa] : a.terms)
            for (const auto& [kb, pb] : b.terms)
                for (const auto& [ma, ca] : pa.terms)
                    for (const auto& [mb, cb] : pb.terms)
                        r.add_term(ka.first + kb.first, ka.second + kb.second, ma * mb, ca * cb);
        return r;
    }

    friend bool operator==(const AmplitudePoly&, const AmplitudePoly&) = default;

    /// Drop terms whose coefficient carries symbol^e with e > max_power.
    AmplitudePoly truncate_order(const std::string& symbol, int max_power) const {
        AmplitudePoly r;
        for (const auto& [k, p] : terms)
            for (const auto& [m, c] : p.terms)
                if (m.exponent(symbol) <= max_power) r.add_term(k.first, k.second, m, c);
        return r;
    }

    std::complex<double> eval(const Substitution& subs, std::complex<double> alpha) const {
        std::complex<double> v{0.0, 0.0};
        for (const auto& [k, p] : terms) {
            std::complex<double> amp =
                std::pow(std::conj(alpha), k.first) * std::pow(alpha, k.second);
            v += amp * p.eval(subs);
        }
        return v;
    }

    /// True iff only matched (p,p) amplitude powers appear with real
    /// coefficients, i.e. the value depends on |alpha| alone and is real.
    bool is_real_in_mod_alpha() const {
        for (const auto& [k, p] : terms) {
            if (k.first != k.second) return false;
            for (const auto& [m, c] : p.terms)
                if (c.im != 0) return false;
        }
        return true;
    }

    std::string str() const {
        if (terms.empty()) return "0";
        std::string s;
        for (const auto& [k, p] : terms) {
            for (const auto& [m, c] : p.terms) {
                if (!s.empty()) s += " + ";
                s += c.str();
                std::string syms = m.str();
                if (!syms.empty()) s += " " + syms;
                if (k.first == k.second && k.first > 0) {
                    s += " |alpha|^" + std::to_string(2 * k.first);
                } else {
                    if (k.first > 0) s += " alpha*^" + std::to_string(k.first);
                    if (k.second > 0) s += " alpha^" + std::to_string(k.second);
                }
            }
        }
        return s;
    }
};

}  // namespace hoa
