#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"
#include "symbols.hpp"

namespace hoa {

/// A bosonic mode: stable small index plus a short display label.
struct ModeId {
    int index = 0;
    std::string label;

    friend bool operator==(const ModeId&, const ModeId&) = default;
};

/// Thrown when an intermediate expansion would exceed the term ceiling.
struct TermLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configurable guard against runaway term explosion in products.
inline std::size_t& term_ceiling() {
    static std::size_t ceiling = 1'000'000;
    return ceiling;
}

/// Normal-ordered powers of one mode: a†^cr a^an.
struct ModePowers {
    int mode = 0;
    int cr = 0;
    int an = 0;

    friend bool operator==(const ModePowers&, const ModePowers&) = default;
    friend auto operator<=>(const ModePowers&, const ModePowers&) = default;
};

/// Product of normal-ordered mode factors, sorted by mode index.
/// Modes with (0,0) powers are never stored; the empty monomial is the
/// identity operator.
struct NormalMonomial {
    std::vector<ModePowers> factors;

    static NormalMonomial identity() { return {}; }

    static NormalMonomial single(int mode, int cr, int an) {
        NormalMonomial m;
        if (cr != 0 || an != 0) m.factors.push_back({mode, cr, an});
        return m;
    }

    bool is_identity() const { return factors.empty(); }

    int total_degree() const {
        int d = 0;
        for (const auto& f : factors) d += f.cr + f.an;
        return d;
    }

    ModePowers powers_of(int mode) const {
        for (const auto& f : factors)
            if (f.mode == mode) return f;
        return {mode, 0, 0};
    }

    /// Hermitian conjugate: swap creation/annihilation powers per mode.
    /// Already in normal form, since the swap happens within each mode.
    NormalMonomial dagger() const {
        NormalMonomial m = *this;
        for (auto& f : m.factors) std::swap(f.cr, f.an);
        return m;
    }

    friend bool operator==(const NormalMonomial&, const NormalMonomial&) = default;
    friend auto operator<=>(const NormalMonomial& a, const NormalMonomial& b) {
        return a.factors <=> b.factors;
    }
};

namespace detail {

inline Rational falling_factorial_weight(int q1, int p2, int k) {
    // C(q1,k) * C(p2,k) * k!
    boost::multiprecision::cpp_int w = 1;
    for (int j = 0; j < k; ++j) w *= (q1 - j);
    boost::multiprecision::cpp_int w2 = 1;
    for (int j = 0; j < k; ++j) w2 *= (p2 - j);
    boost::multiprecision::cpp_int kf = 1;
    for (int j = 2; j <= k; ++j) kf *= j;
    return Rational(w * w2 / kf);
}

}  // namespace detail

/// Polynomial in normal-ordered operator monomials with exact scalar
/// coefficients. Terms are keyed by (operator monomial, symbol monomial)
/// so equality is a direct map comparison and like terms merge by
/// construction.
class OperatorPoly {
  public:
    using Key = std::pair<NormalMonomial, SymbolMonomial>;
    using TermMap = std::map<Key, GaussianRational>;

    OperatorPoly() = default;

    static OperatorPoly zero() { return {}; }

    static OperatorPoly term(NormalMonomial m, GaussianRational c,
                             SymbolMonomial s = SymbolMonomial::unit()) {
        OperatorPoly p;
        p.add_term(std::move(m), std::move(s), std::move(c));
        return p;
    }

    static OperatorPoly annihilation(int mode) {
        return term(NormalMonomial::single(mode, 0, 1), GaussianRational::one());
    }
    static OperatorPoly creation(int mode) {
        return term(NormalMonomial::single(mode, 1, 0), GaussianRational::one());
    }
    static OperatorPoly identity() {
        return term(NormalMonomial::identity(), GaussianRational::one());
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add_term(NormalMonomial m, SymbolMonomial s, GaussianRational c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace({std::move(m), std::move(s)}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
        if (terms_.size() > term_ceiling())
            throw TermLimitError("operator polynomial exceeds term ceiling (" +
                                 std::to_string(term_ceiling()) + " terms)");
    }

    OperatorPoly& operator+=(const OperatorPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
        return *this;
    }
    OperatorPoly& operator-=(const OperatorPoly& o) {
        for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
        return *this;
    }
    friend OperatorPoly operator+(OperatorPoly a, const OperatorPoly& b) { return a += b; }
    friend OperatorPoly operator-(OperatorPoly a, const OperatorPoly& b) { return a -= b; }

    OperatorPoly scaled(const GaussianRational& c,
                        const SymbolMonomial& s = SymbolMonomial::unit()) const {
        OperatorPoly r;
        for (const auto& [k, v] : terms_) r.add_term(k.first, k.second * s, v * c);
        return r;
    }

    friend bool operator==(const OperatorPoly&, const OperatorPoly&) = default;

    /// Hermitian conjugate. Per-monomial daggers stay normal ordered, so
    /// no re-ordering pass is needed.
    OperatorPoly dagger() const {
        OperatorPoly r;
        for (const auto& [k, c] : terms_) r.add_term(k.first.dagger(), k.second, c.conj());
        return r;
    }

    /// Drop every term whose coefficient carries symbol^e with e > max_power.
    OperatorPoly truncate_order(const std::string& symbol, int max_power) const {
        OperatorPoly r;
        for (const auto& [k, c] : terms_)
            if (k.second.exponent(symbol) <= max_power) r.add_term(k.first, k.second, c);
        return r;
    }

    std::string str(const std::vector<std::string>& mode_labels = {}) const;

  private:
    TermMap terms_;
};

namespace detail {

/// Normal-ordered product of two normal monomials. Distinct modes commute,
/// so the product factorizes; within one mode,
///   (a†^p1 a^q1)(a†^p2 a^q2) = sum_k C(q1,k) C(p2,k) k! a†^(p1+p2-k) a^(q1+q2-k).
inline void multiply_monomials(const NormalMonomial& x, const NormalMonomial& y,
                               const GaussianRational& coeff, const SymbolMonomial& sym,
                               OperatorPoly& out) {
    std::vector<int> modes;
    for (const auto& f : x.factors) modes.push_back(f.mode);
    for (const auto& f : y.factors)
        if (std::find(modes.begin(), modes.end(), f.mode) == modes.end())
            modes.push_back(f.mode);
    std::sort(modes.begin(), modes.end());

    struct Partial {
        NormalMonomial mono;
        Rational weight;
    };
    std::vector<Partial> acc{{NormalMonomial::identity(), Rational(1)}};
    for (int mode : modes) {
        ModePowers a = x.powers_of(mode);
        ModePowers b = y.powers_of(mode);
        int kmax = std::min(a.an, b.cr);
        std::vector<Partial> next;
        next.reserve(acc.size() * (kmax + 1));
        for (int k = 0; k <= kmax; ++k) {
            Rational w = falling_factorial_weight(a.an, b.cr, k);
            ModePowers p{mode, a.cr + b.cr - k, a.an + b.an - k};
            for (const auto& part : acc) {
                Partial np = part;
                np.weight *= w;
                if (p.cr != 0 || p.an != 0) np.mono.factors.push_back(p);
                next.push_back(std::move(np));
            }
        }
        acc = std::move(next);
    }
    for (auto& part : acc)
        out.add_term(std::move(part.mono), sym, coeff * GaussianRational(part.weight));
}

}  // namespace detail

inline OperatorPoly multiply(const OperatorPoly& p, const OperatorPoly& q) {
    OperatorPoly r;
    for (const auto& [kp, cp] : p.terms())
        for (const auto& [kq, cq] : q.terms())
            detail::multiply_monomials(kp.first, kq.first, cp * cq, kp.second * kq.second, r);
    return r;
}

inline OperatorPoly operator*(const OperatorPoly& p, const OperatorPoly& q) {
    return multiply(p, q);
}

inline OperatorPoly commutator(const OperatorPoly& p, const OperatorPoly& q) {
    return multiply(p, q) - multiply(q, p);
}

/// One elementary factor of an unordered operator product.
struct RawFactor {
    int mode = 0;
    bool creation = false;
};

/// Unordered product of elementary factors with an exact scalar prefactor.
struct RawProduct {
    GaussianRational coeff = GaussianRational::one();
    SymbolMonomial symbols;
    std::vector<RawFactor> factors;
};

/// Rewrite an unordered factor product into canonical normal form by
/// folding factors left to right; each fold applies a a† = a†a + 1 to
/// completion through the closed-form monomial product.
inline OperatorPoly normal_order(const RawProduct& raw) {
    OperatorPoly p = OperatorPoly::term(NormalMonomial::identity(), raw.coeff, raw.symbols);
    for (const auto& f : raw.factors) {
        OperatorPoly el = f.creation ? OperatorPoly::creation(f.mode)
                                     : OperatorPoly::annihilation(f.mode);
        p = multiply(p, el);
    }
    return p;
}

inline std::string OperatorPoly::str(const std::vector<std::string>& mode_labels) const {
    if (terms_.empty()) return "0";
    auto label = [&](int mode) {
        if (mode >= 0 && mode < static_cast<int>(mode_labels.size())) return mode_labels[mode];
        return std::string(1, static_cast<char>('A' + mode));
    };
    std::string s;
    for (const auto& [k, c] : terms_) {
        if (!s.empty()) s += " + ";
        std::string factor = c.str();
        std::string syms = k.second.str();
        if (!syms.empty()) factor += " " + syms;
        s += factor;
        for (const auto& f : k.first.factors) {
            s += " ";
            if (f.cr > 0) {
                s += label(f.mode) + "†";
                if (f.cr > 1) s += "^" + std::to_string(f.cr);
            }
            if (f.an > 0) {
                s += label(f.mode);
                if (f.an > 1) s += "^" + std::to_string(f.an);
            }
        }
    }
    return s;
}

}  // namespace hoa
