#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "amplitude.hpp"
#include "solver.hpp"
#include "system.hpp"

namespace hoa {

/// Expectation of a normal-ordered polynomial on the coherent(pump) x
/// vacuum product state: vacuum modes kill any term touching them, the
/// pump mode contributes alpha*^cr alpha^an per term.
inline AmplitudePoly expect_coherent_vacuum(const OperatorPoly& p, int pump_mode) {
    AmplitudePoly out;
    for (const auto& [key, coeff] : p.terms()) {
        int astar = 0, a = 0;
        bool vanishes = false;
        for (const auto& f : key.first.factors) {
            if (f.mode == pump_mode) {
                astar = f.cr;
                a = f.an;
            } else if (f.cr != 0 || f.an != 0) {
                vanishes = true;
                break;
            }
        }
        if (!vanishes) out.add_term(astar, a, key.second, coeff);
    }
    return out;
}

/// i-th factorial moment <N^(i)(t)> = <A†^i(t) A^i(t)> with consistent
/// perturbative truncation.
inline AmplitudePoly factorial_moment(const SystemDef& sys, const TimeSeriesSolution& sol,
                                      int i) {
    if (i < 1) throw std::invalid_argument("factorial_moment: i must be >= 1");
    OperatorPoly ai = power_of_solution(sol, i);
    OperatorPoly n_i = multiply(ai.dagger(), ai).truncate_order("t", sol.order);
    return expect_coherent_vacuum(n_i, sys.pump_mode());
}

/// <N(t)>^k, truncated past t^order.
inline AmplitudePoly mean_power(const SystemDef& sys, const TimeSeriesSolution& sol, int k) {
    if (k < 1) throw std::invalid_argument("mean_power: k must be >= 1");
    AmplitudePoly mean = factorial_moment(sys, sol, 1);
    AmplitudePoly p = mean;
    for (int j = 1; j < k; ++j) p = (p * mean).truncate_order("t", sol.order);
    return p;
}

/// d(l) = <N^(l+1)(t)> - <N(t)>^(l+1); negativity certifies l-th order
/// antibunching.
inline AmplitudePoly criterion_d(const SystemDef& sys, const TimeSeriesSolution& sol, int l) {
    if (l < 1) throw std::invalid_argument("criterion_d: l must be >= 1");
    return factorial_moment(sys, sol, l + 1) - mean_power(sys, sol, l + 1);
}

/// Symbolic ratio criterion held as numerator/denominator pair; the
/// criterion value is num/den, negative iff antibunched (den > 0).
struct CriterionRatio {
    AmplitudePoly numerator;
    AmplitudePoly denominator;

    std::complex<double> eval(const Substitution& subs, std::complex<double> alpha) const {
        std::complex<double> den = denominator.eval(subs, alpha);
        if (std::abs(den) == 0.0)
            throw std::domain_error("criterion undefined: zero denominator at evaluation point");
        return numerator.eval(subs, alpha) / den;
    }
};

namespace detail {

/// <N^(0)> is defined as 1.
inline AmplitudePoly moment_at(const std::vector<AmplitudePoly>& moments, int i) {
    if (i == 0) return AmplitudePoly::constant(GaussianRational::one());
    if (i < 1 || i > static_cast<int>(moments.size()))
        throw std::invalid_argument("moment index " + std::to_string(i) +
                                    " not supplied (have 1.." +
                                    std::to_string(moments.size()) + ")");
    return moments[static_cast<std::size_t>(i) - 1];
}

}  // namespace detail

/// R(l,m) = <N^(l+1)><N^(m-1)> / (<N^(l)><N^(m)>) - 1.
/// moments[i-1] holds <N^(i)>.
inline CriterionRatio criterion_R(const std::vector<AmplitudePoly>& moments, int l, int m) {
    if (l < 1 || m < 1) throw std::invalid_argument("criterion_R: l and m must be >= 1");
    AmplitudePoly num = detail::moment_at(moments, l + 1) * detail::moment_at(moments, m - 1);
    AmplitudePoly den = detail::moment_at(moments, l) * detail::moment_at(moments, m);
    return {num - den, den};
}

/// A_l = R(l,1): <N^(l+1)> / (<N^(l)><N>) - 1.
inline CriterionRatio criterion_A(const std::vector<AmplitudePoly>& moments, int l) {
    return criterion_R(moments, l, 1);
}

/// Diagnostic only: checks each link of the inequality chain
/// <N^(k+1)><N>^(l-k) < <N^(k)><N>^(l-k+1) at one evaluation point.
struct ChainCheck {
    std::vector<bool> links;
    bool all_hold = false;
};

inline ChainCheck chain_check(const std::vector<AmplitudePoly>& moments, int l,
                              const Substitution& subs, std::complex<double> alpha) {
    ChainCheck out;
    double mean_val = detail::moment_at(moments, 1).eval(subs, alpha).real();
    out.all_hold = true;
    for (int k = l; k >= 1; --k) {
        double lhs = detail::moment_at(moments, k + 1).eval(subs, alpha).real() *
                     std::pow(mean_val, l - k);
        double rhs = detail::moment_at(moments, k).eval(subs, alpha).real() *
                     std::pow(mean_val, l - k + 1);
        bool holds = lhs < rhs;
        out.links.push_back(holds);
        out.all_hold = out.all_hold && holds;
    }
    return out;
}

/// Numeric variant for externally supplied moment values (e.g. from the
/// Fock oracle or hand-built distributions).
inline ChainCheck chain_check_numeric(const std::vector<double>& moments, int l) {
    ChainCheck out;
    out.all_hold = true;
    auto at = [&](int i) { return i == 0 ? 1.0 : moments.at(static_cast<std::size_t>(i) - 1); };
    double mean = at(1);
    for (int k = l; k >= 1; --k) {
        bool holds = at(k + 1) * std::pow(mean, l - k) < at(k) * std::pow(mean, l - k + 1);
        out.links.push_back(holds);
        out.all_hold = out.all_hold && holds;
    }
    return out;
}

/// One numeric grid point of a sweep.
struct NumericPoint {
    double g = 0, t = 0;
    std::complex<double> alpha;
    int l = 1;
    double d = 0;
    double A = 0;  // NaN when undefined (alpha = 0)
    double R = 0;  // R(l,1); NaN when undefined
};

/// Symbolic moments and criteria of one system at one perturbative order,
/// plus an optional numeric table.
struct MomentReport {
    std::string system_name;
    int order = 2;
    int l_max = 2;
    std::vector<AmplitudePoly> moments;      // <N^(i)(t)>, i = 1..l_max+1
    std::vector<AmplitudePoly> mean_powers;  // <N(t)>^i,   i = 1..l_max+1
    std::vector<AmplitudePoly> d_values;     // d(1)..d(l_max)
    std::vector<NumericPoint> numeric;
};

inline MomentReport make_moment_report(const SystemDef& sys, const TimeSeriesSolution& sol,
                                       int l_max) {
    if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
    MomentReport rep;
    rep.system_name = sys.name;
    rep.order = sol.order;
    rep.l_max = l_max;
    for (int i = 1; i <= l_max + 1; ++i) {
        rep.moments.push_back(factorial_moment(sys, sol, i));
        rep.mean_powers.push_back(mean_power(sys, sol, i));
    }
    for (int l = 1; l <= l_max; ++l)
        rep.d_values.push_back(rep.moments[static_cast<std::size_t>(l)] -
                               rep.mean_powers[static_cast<std::size_t>(l)]);
    return rep;
}

/// Evaluate d, A and R(l,1) at one parameter point from the symbolic report.
inline NumericPoint eval_point(const MomentReport& rep, int l, double g, double t,
                               std::complex<double> alpha) {
    Substitution subs{{{"g", g}, {"t", t}}};
    NumericPoint pt;
    pt.g = g;
    pt.t = t;
    pt.alpha = alpha;
    pt.l = l;
    pt.d = rep.d_values.at(static_cast<std::size_t>(l) - 1).eval(subs, alpha).real();
    try {
        pt.A = criterion_A(rep.moments, l).eval(subs, alpha).real();
        pt.R = criterion_R(rep.moments, l, 1).eval(subs, alpha).real();
    } catch (const std::domain_error&) {
        pt.A = std::numeric_limits<double>::quiet_NaN();
        pt.R = std::numeric_limits<double>::quiet_NaN();
    }
    return pt;
}

}  // namespace hoa
