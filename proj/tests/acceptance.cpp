// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Oracle-backed criteria use the default cutoffs and report their
// runtimes.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "hoa/dsl.hpp"
#include "hoa/fock.hpp"
#include "hoa/moments.hpp"
#include "ladder_oracle.hpp"
#include "random_ops.hpp"

using namespace hoa;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL", what.c_str());
    if (!pass) ++failures;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

struct SystemBundle {
    SystemDef sys;
    TimeSeriesSolution sol;
    MomentReport rep;
};

SystemBundle bundle(const std::string& name, int order = 2, int l_max = 3) {
    SystemDef sys = builtin_system(name);
    TimeSeriesSolution sol = taylor_solve(sys, sys.modes[0].label, order);
    MomentReport rep = make_moment_report(sys, sol, l_max);
    return {std::move(sys), std::move(sol), std::move(rep)};
}

AmplitudePoly quad_term(int half_power, long coefficient) {
    AmplitudePoly p;
    p.add_term(half_power, half_power,
               SymbolMonomial::of("g", 2) * SymbolMonomial::of("t", 2),
               GaussianRational(coefficient));
    return p;
}

AmplitudePoly base_term(int half_power, long coefficient) {
    AmplitudePoly p;
    p.add_term(half_power, half_power, SymbolMonomial::unit(), GaussianRational(coefficient));
    return p;
}

double oracle_d(const SystemDef& sys, const std::vector<int>& cutoffs, int l, double g,
                double t, std::complex<double> alpha) {
    FockBasis basis(cutoffs);
    SparseHamiltonian h(basis, sys.h_int, Substitution{{{"g", g}}});
    FockState psi = evolve(h, prepare_initial(sys, basis, alpha), t);
    auto m = measure_factorial_moments(psi, sys.pump_mode(), l + 1);
    return m[static_cast<std::size_t>(l)] - std::pow(m[0], double(l) + 1.0);
}

}  // namespace

int main() {
    // --- 1: closed-form d(1), d(2) for all three systems, exact ---
    {
        double t0 = now_seconds();
        auto six = bundle("six_wave");
        auto four = bundle("four_wave");
        auto shg = bundle("shg");
        bool ok = six.rep.d_values[0] == quad_term(2, -12) &&
                  six.rep.d_values[1] == quad_term(3, -36) &&
                  four.rep.d_values[0] == quad_term(2, -2) &&
                  four.rep.d_values[1] == quad_term(3, -6) &&
                  shg.rep.d_values[0] == quad_term(2, -2) &&
                  shg.rep.d_values[1] == quad_term(3, -6);
        double dt = now_seconds() - t0;
        ok = ok && dt < 10.0;
        report(1, ok, "closed-form d(1)/d(2) for six_wave, four_wave, shg (exact, " +
                          std::to_string(dt) + " s)");
    }

    // --- 2: six-wave intermediate moments, exact ---
    {
        auto six = bundle("six_wave");
        bool ok = six.rep.mean_powers[1] == base_term(2, 1) + quad_term(3, -24) &&
                  six.rep.moments[1] == base_term(2, 1) + quad_term(3, -24) + quad_term(2, -12) &&
                  six.rep.moments[2] == base_term(3, 1) + quad_term(4, -36) + quad_term(3, -36) &&
                  six.rep.mean_powers[2] == base_term(3, 1) + quad_term(4, -36);
        report(2, ok, "six-wave <N(t)>^2, <N^(2)(t)>, <N^(3)(t)>, <N(t)>^3 (exact)");
    }

    // --- 3: oracle agreement at g=1e-3, t=1, alpha=1, 1e-4 relative ---
    // --- 4: convergence slope over gt in {5e-4, 1e-3, 2e-3} ---
    for (std::string name : {"six_wave", "four_wave", "shg"}) {
        auto b = bundle(name, 2, 2);
        // For the agreement check the symbolic side is taken to order 4:
        // at order 2 the six-wave d(2) truncation error itself is ~1.6e-4
        // relative at gt = 1e-3, which would mask the comparison.
        auto b4 = bundle(name, 4, 2);
        auto cutoffs = default_cutoffs(b.sys, 1.0);
        Substitution subs{{{"g", 1e-3}, {"t", 1.0}}};
        double t0 = now_seconds();

        bool agree = true;
        std::string detail;
        for (int l = 1; l <= 2; ++l) {
            double symbolic = b4.rep.d_values[static_cast<std::size_t>(l) - 1]
                                  .eval(subs, {1.0, 0.0})
                                  .real();
            double oracle = oracle_d(b.sys, cutoffs, l, 1e-3, 1.0, {1.0, 0.0});
            double rel = std::abs(oracle - symbolic) / std::abs(symbolic);
            agree = agree && rel < 1e-4;
            detail += " d(" + std::to_string(l) + ") rel=" + std::to_string(rel);
        }
        double dt = now_seconds() - t0;
        agree = agree && dt < 60.0;
        report(3, agree, name + " oracle d(l) within 1e-4 relative (" +
                             std::to_string(dt) + " s;" + detail + ")");

        std::vector<double> lx, ly;
        for (double g : {5e-4, 1e-3, 2e-3}) {
            Substitution s2{{{"g", g}, {"t", 1.0}}};
            double symbolic = b.rep.d_values[0].eval(s2, {1.0, 0.0}).real();
            double oracle = oracle_d(b.sys, cutoffs, 1, g, 1.0, {1.0, 0.0});
            double rel = std::abs(oracle - symbolic) / std::abs(symbolic);
            lx.push_back(std::log(g));
            ly.push_back(std::log(rel));
        }
        double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
        report(4, slope >= 1.8,
               name + " symbolic-vs-oracle d(1) log-log slope = " + std::to_string(slope));
    }

    // --- 5: cross-system structure, exact ---
    {
        auto six = bundle("six_wave");
        auto four = bundle("four_wave");
        auto shg = bundle("shg");
        bool ok = true;
        for (int l = 1; l <= 2; ++l) {
            const auto& d6 = six.rep.d_values[static_cast<std::size_t>(l) - 1];
            const auto& d4 = four.rep.d_values[static_cast<std::size_t>(l) - 1];
            const auto& ds = shg.rep.d_values[static_cast<std::size_t>(l) - 1];
            ok = ok && d6 == d4 * AmplitudePoly::constant(GaussianRational(6)) && d4 == ds;
        }
        report(5, ok, "d(l)_six = 6 d(l)_four and d(l)_four = d(l)_shg for l in {1,2} (exact)");
    }

    // --- 6: coherence boundary at t = 0 ---
    {
        bool ok = true;
        for (std::string name : {"six_wave", "four_wave", "shg"}) {
            auto b = bundle(name, 2, 3);
            for (int l = 1; l <= 3; ++l)
                ok = ok &&
                     b.rep.d_values[static_cast<std::size_t>(l) - 1].truncate_order("t", 0).is_zero();
        }
        report(6, ok, "d(l) = 0 exactly at t = 0 for l in {1,2,3}, all builtins");
    }

    // --- 7: normal-ordering ladder-oracle property, 200 random polynomials ---
    {
        std::mt19937 rng(2024);
        Substitution subs{{{"g", 0.83}, {"t", 0.41}}};
        bool ok = true;
        for (int trial = 0; trial < 200 && ok; ++trial) {
            RawProduct raw = testgen::random_raw_product(rng, 3, 6);
            OperatorPoly ordered = normal_order(raw);
            for (const auto& occ : oracle::enumerate_occupations(3, 3)) {
                auto lhs = oracle::apply_raw(raw, occ, subs);
                auto rhs = oracle::apply_poly(ordered, occ, subs);
                if (oracle::max_difference(lhs, rhs) >= 1e-10) {
                    ok = false;
                    break;
                }
            }
        }
        report(7, ok, "200 random products: normal ordering matches ladder oracle at 1e-10");
    }

    // --- 8: six-wave conservation over t in [0,1] at g = 1e-3 ---
    {
        SystemDef sys = builtin_system("six_wave");
        FockBasis basis(default_cutoffs(sys, 1.0));
        SparseHamiltonian h(basis, sys.h_int, Substitution{{{"g", 1e-3}}});
        FockState psi0 = prepare_initial(sys, basis, {1.0, 0.0});
        double combo0 = expectation_occupation(psi0, {3.0, 2.0, 0.0});
        bool ok = true;
        for (double t : {0.25, 0.5, 0.75, 1.0}) {
            FockState psi = evolve(h, psi0, t);
            double combo = expectation_occupation(psi, {3.0, 2.0, 0.0});
            ok = ok && std::abs(psi.norm() - 1.0) < 1e-9 &&
                 std::abs(combo - combo0) <= 1e-8 * std::abs(combo0);
        }
        report(8, ok, "norm to 1e-9 and <3N_A + 2N_B> to 1e-8 relative over t in [0,1]");
    }

    // --- 9: first-order solutions show no antibunching ---
    {
        bool ok = true;
        for (std::string name : {"six_wave", "four_wave", "shg"}) {
            auto b = bundle(name, 1, 2);
            for (int l = 1; l <= 2; ++l)
                ok = ok &&
                     b.rep.d_values[static_cast<std::size_t>(l) - 1].truncate_order("t", 1).is_zero();
        }
        report(9, ok, "order-1 solutions: d(1), d(2) have no term of t-power <= 1");
    }

    // --- 10: phase invariance of numeric d(l) at fixed |alpha| ---
    {
        bool ok = true;
        Substitution subs{{{"g", 1e-3}, {"t", 1.0}}};
        for (std::string name : {"six_wave", "four_wave", "shg"}) {
            auto b = bundle(name, 2, 2);
            for (double mod : {1.0, 1.4}) {
                for (int l = 1; l <= 2; ++l) {
                    double ref = b.rep.d_values[static_cast<std::size_t>(l) - 1]
                                     .eval(subs, {mod, 0.0})
                                     .real();
                    for (int k = 1; k < 8; ++k) {
                        double phase = 2.0 * M_PI * k / 8.0;
                        std::complex<double> alpha = std::polar(mod, phase);
                        double val = b.rep.d_values[static_cast<std::size_t>(l) - 1]
                                         .eval(subs, alpha)
                                         .real();
                        ok = ok && std::abs(val - ref) < 1e-12;
                    }
                }
            }
        }
        report(10, ok, "numeric d(l) identical to 1e-12 across pump phases at fixed |alpha|");
    }

    if (failures == 0) std::printf("acceptance: all criteria passed\n");
    else std::printf("acceptance: %d criterion group(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
