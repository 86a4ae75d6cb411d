#pragma once

#include <stdexcept>
#include <string>

#include "algebra.hpp"
#include "system.hpp"

namespace hoa {

/// Short-time Taylor-series Heisenberg solution of one elementary mode
/// operator, truncated at t^order. Coefficients carry explicit t^k powers;
/// the t^0 term is the bare operator.
struct TimeSeriesSolution {
    std::string system_name;
    std::string operator_label;
    int order = 0;
    OperatorPoly series;
};

/// i [h_int, p], normal ordered (interaction picture: the free-evolution
/// commutator cancels against the explicit time dependence exactly).
inline OperatorPoly heisenberg_derivative(const SystemDef& sys, const OperatorPoly& p) {
    return commutator(sys.h_int, p).scaled(GaussianRational::i());
}

/// X(t) = sum_{k=0..order} (t^k / k!) D^k(X) with D the Heisenberg
/// derivative, all operators evaluated at t = 0.
inline TimeSeriesSolution taylor_solve(const SystemDef& sys, const std::string& op_label,
                                       int order) {
    if (order < 1) throw std::invalid_argument("taylor_solve: order must be >= 1");
    int mode = sys.mode_by_label(op_label).index;

    OperatorPoly derivative = OperatorPoly::annihilation(mode);
    OperatorPoly series = derivative;
    Rational k_factorial(1);
    for (int k = 1; k <= order; ++k) {
        derivative = heisenberg_derivative(sys, derivative);
        k_factorial *= k;
        series += derivative.scaled(GaussianRational(Rational(1) / k_factorial),
                                    SymbolMonomial::of("t", k));
    }
    return {sys.name, op_label, order, std::move(series)};
}

/// k-fold product of the series, normal ordered, with consistent
/// perturbative truncation: cross terms beyond t^order are dropped after
/// every multiplication.
inline OperatorPoly power_of_solution(const TimeSeriesSolution& sol, int k) {
    if (k < 1) throw std::invalid_argument("power_of_solution: k must be >= 1");
    OperatorPoly p = sol.series;
    for (int j = 1; j < k; ++j)
        p = multiply(p, sol.series).truncate_order("t", sol.order);
    return p;
}

}  // namespace hoa
