#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "symbols.hpp"
#include "system.hpp"

namespace hoa {

/// Truncated multimode occupation-number basis with per-mode cutoffs.
/// Tuples are enumerated row-major in declared mode order.
class FockBasis {
  public:
    FockBasis(std::vector<int> cutoffs, std::size_t dimension_ceiling = 5'000'000)
        : cutoffs_(std::move(cutoffs)) {
        if (cutoffs_.empty()) throw std::invalid_argument("FockBasis: no modes");
        std::size_t dim = 1;
        for (int c : cutoffs_) {
            if (c < 1) throw std::invalid_argument("FockBasis: cutoffs must be >= 1");
            dim *= static_cast<std::size_t>(c) + 1;
            if (dim > dimension_ceiling)
                throw std::runtime_error("Fock basis dimension exceeds ceiling (" +
                                         std::to_string(dimension_ceiling) + ")");
        }
        dim_ = dim;
        strides_.resize(cutoffs_.size());
        std::size_t s = 1;
        for (std::size_t m = cutoffs_.size(); m-- > 0;) {
            strides_[m] = s;
            s *= static_cast<std::size_t>(cutoffs_[m]) + 1;
        }
    }

    std::size_t dimension() const { return dim_; }
    int n_modes() const { return static_cast<int>(cutoffs_.size()); }
    int cutoff(int mode) const { return cutoffs_[static_cast<std::size_t>(mode)]; }
    const std::vector<int>& cutoffs() const { return cutoffs_; }

    std::size_t index_of(const std::vector<int>& occ) const {
        std::size_t idx = 0;
        for (std::size_t m = 0; m < cutoffs_.size(); ++m)
            idx += static_cast<std::size_t>(occ[m]) * strides_[m];
        return idx;
    }

    std::vector<int> occupation_of(std::size_t index) const {
        std::vector<int> occ(cutoffs_.size());
        for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
            occ[m] = static_cast<int>(index / strides_[m]);
            index %= strides_[m];
        }
        return occ;
    }

    int occupation_of_mode(std::size_t index, int mode) const {
        return static_cast<int>((index / strides_[static_cast<std::size_t>(mode)]) %
                                (static_cast<std::size_t>(cutoffs_[static_cast<std::size_t>(mode)]) + 1));
    }

  private:
    std::vector<int> cutoffs_;
    std::vector<std::size_t> strides_;
    std::size_t dim_ = 0;
};

/// Dense complex amplitude vector over a FockBasis.
struct FockState {
    const FockBasis* basis = nullptr;
    std::vector<std::complex<double>> amplitudes;
    double tail_loss = 0.0;

    double norm() const {
        double s = 0.0;
        for (const auto& a : amplitudes) s += std::norm(a);
        return std::sqrt(s);
    }
};

/// Sparse matrix of h_int in the occupation basis; transitions that would
/// leave the truncated box are dropped (hard truncation).
class SparseHamiltonian {
  public:
    SparseHamiltonian(const FockBasis& basis, const OperatorPoly& h_int,
                      const Substitution& subs)
        : basis_(&basis), rows_(basis.dimension()) {
        std::vector<int> occ;
        for (std::size_t col = 0; col < basis.dimension(); ++col) {
            occ = basis.occupation_of(col);
            for (const auto& [key, coeff] : h_int.terms()) {
                double ladder = 1.0;
                std::vector<int> n = occ;
                bool dropped = false;
                // annihilation first (right to left within the normal form)
                for (const auto& f : key.first.factors) {
                    for (int j = 0; j < f.an; ++j) {
                        if (n[static_cast<std::size_t>(f.mode)] == 0) {
                            dropped = true;
                            break;
                        }
                        ladder *= std::sqrt(static_cast<double>(n[static_cast<std::size_t>(f.mode)]));
                        --n[static_cast<std::size_t>(f.mode)];
                    }
                    if (dropped) break;
                }
                if (dropped) continue;
                for (const auto& f : key.first.factors) {
                    for (int j = 0; j < f.cr; ++j) {
                        if (n[static_cast<std::size_t>(f.mode)] >= basis.cutoff(f.mode)) {
                            dropped = true;
                            break;
                        }
                        ++n[static_cast<std::size_t>(f.mode)];
                        ladder *= std::sqrt(static_cast<double>(n[static_cast<std::size_t>(f.mode)]));
                    }
                    if (dropped) break;
                }
                if (dropped) continue;
                std::size_t row = basis.index_of(n);
                add_entry(row, col, coeff.to_complex() * subs.eval(key.second) * ladder);
            }
        }
    }

    const FockBasis& basis() const { return *basis_; }

    void apply(const std::vector<std::complex<double>>& x,
               std::vector<std::complex<double>>& y) const {
        std::fill(y.begin(), y.end(), std::complex<double>{0.0, 0.0});
        for (std::size_t r = 0; r < rows_.size(); ++r)
            for (const auto& [c, v] : rows_[r]) y[r] += v * x[c];
    }

    std::complex<double> expectation(const FockState& psi) const {
        std::vector<std::complex<double>> hpsi(psi.amplitudes.size());
        apply(psi.amplitudes, hpsi);
        std::complex<double> e{0.0, 0.0};
        for (std::size_t i = 0; i < hpsi.size(); ++i)
            e += std::conj(psi.amplitudes[i]) * hpsi[i];
        return e;
    }

    std::complex<double> element(std::size_t row, std::size_t col) const {
        for (const auto& [c, v] : rows_[row])
            if (c == col) return v;
        return {0.0, 0.0};
    }

    double hermiticity_defect() const {
        double worst = 0.0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            for (const auto& [c, v] : rows_[r]) {
                std::complex<double> vt{0.0, 0.0};
                for (const auto& [c2, v2] : rows_[c])
                    if (c2 == r) vt = v2;
                worst = std::max(worst, std::abs(v - std::conj(vt)));
            }
        }
        return worst;
    }

  private:
    void add_entry(std::size_t row, std::size_t col, std::complex<double> v) {
        for (auto& [c, existing] : rows_[row]) {
            if (c == col) {
                existing += v;
                return;
            }
        }
        rows_[row].emplace_back(col, v);
    }

    const FockBasis* basis_;
    std::vector<std::vector<std::pair<std::size_t, std::complex<double>>>> rows_;
};

/// Default cutoffs: generous Poisson coverage for the pump and three
/// conversion events' worth of headroom for the emitted modes.
inline std::vector<int> default_cutoffs(const SystemDef& sys, double abs_alpha) {
    double nbar = abs_alpha * abs_alpha;
    std::vector<int> cutoffs(sys.modes.size(), 6);
    int pump = sys.pump_mode();
    cutoffs[static_cast<std::size_t>(pump)] =
        static_cast<int>(std::ceil(nbar + 8.0 * std::sqrt(nbar + 1.0))) + 8;
    for (const auto& m : sys.modes) {
        if (m.index == pump) continue;
        int per_conversion = 0;
        for (const auto& [key, coeff] : sys.h_int.terms())
            per_conversion = std::max(per_conversion, key.first.powers_of(m.index).cr);
        cutoffs[static_cast<std::size_t>(m.index)] = std::max(3 * per_conversion, 6);
    }
    return cutoffs;
}

/// |alpha> in the pump mode, vacuum elsewhere; refuses when the coherent
/// tail beyond the cutoff exceeds eps_trunc.
inline FockState prepare_initial(const SystemDef& sys, const FockBasis& basis,
                                 std::complex<double> alpha, double eps_trunc = 1e-10) {
    int pump = sys.pump_mode();
    int nmax = basis.cutoff(pump);
    std::vector<std::complex<double>> pump_amps(static_cast<std::size_t>(nmax) + 1);
    double nbar = std::norm(alpha);
    // c_n = e^{-|a|^2/2} a^n / sqrt(n!)
    std::complex<double> c = std::exp(-nbar / 2.0);
    double captured = 0.0;
    for (int n = 0; n <= nmax; ++n) {
        if (n > 0) c *= alpha / std::sqrt(static_cast<double>(n));
        pump_amps[static_cast<std::size_t>(n)] = c;
        captured += std::norm(c);
    }
    double tail = 1.0 - captured;
    if (tail > eps_trunc) {
        int suggested = static_cast<int>(std::ceil(nbar + 10.0 * std::sqrt(nbar + 1.0))) + 10;
        throw std::runtime_error("coherent tail loss " + std::to_string(tail) +
                                 " exceeds " + std::to_string(eps_trunc) +
                                 "; raise pump cutoff to ~" + std::to_string(suggested));
    }

    FockState psi;
    psi.basis = &basis;
    psi.tail_loss = tail;
    psi.amplitudes.assign(basis.dimension(), {0.0, 0.0});
    std::vector<int> occ(static_cast<std::size_t>(basis.n_modes()), 0);
    double renorm = 1.0 / std::sqrt(captured);
    for (int n = 0; n <= nmax; ++n) {
        occ[static_cast<std::size_t>(pump)] = n;
        psi.amplitudes[basis.index_of(occ)] = pump_amps[static_cast<std::size_t>(n)] * renorm;
    }
    return psi;
}

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dp45 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

}  // namespace detail

/// psi(t) = exp(-i h t) psi(0) via adaptive Dormand-Prince 5(4) on
/// dpsi/dt = -i h psi, stepped against a local error tolerance.
inline FockState evolve(const SparseHamiltonian& h, const FockState& psi0, double t,
                        double local_tol = 1e-12) {
    if (t < 0) throw std::invalid_argument("evolve: t must be >= 0");
    using Vec = std::vector<std::complex<double>>;
    const std::size_t dim = psi0.amplitudes.size();
    Vec y = psi0.amplitudes;
    if (t == 0) return psi0;

    Vec k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim), ynew(dim);
    auto rhs = [&](const Vec& x, Vec& out) {
        h.apply(x, out);
        for (auto& v : out) v *= std::complex<double>{0.0, -1.0};
    };

    using D = detail::Dp45;
    double time = 0.0;
    double dt = std::min(t, 1e-3);
    rhs(y, k1);  // FSAL
    long steps = 0;
    const long max_steps = 50'000'000;
    while (time < t) {
        if (++steps > max_steps)
            throw std::runtime_error("evolve: integrator failed to converge (step limit)");
        dt = std::min(dt, t - time);

        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * (D::a21 * k1[i]);
        rhs(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + dt * (D::a31 * k1[i] + D::a32 * k2[i]);
        rhs(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + dt * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
        rhs(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + dt * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] +
                                  D::a54 * k4[i]);
        rhs(tmp, k5);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + dt * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] +
                                  D::a64 * k4[i] + D::a65 * k5[i]);
        rhs(tmp, k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] = y[i] + dt * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] +
                                   D::b5 * k5[i] + D::b6 * k6[i]);
        rhs(ynew, k7);

        double err2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            std::complex<double> e = dt * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] +
                                           D::e5 * k5[i] + D::e6 * k6[i] + D::e7 * k7[i]);
            err2 += std::norm(e);
        }
        double err = std::sqrt(err2);

        if (err <= local_tol) {
            time += dt;
            std::swap(y, ynew);
            std::swap(k1, k7);
        }
        double scale = err > 0 ? 0.9 * std::pow(local_tol / err, 0.2) : 5.0;
        scale = std::clamp(scale, 0.2, 5.0);
        dt *= scale;
        if (dt < 1e-15)
            throw std::runtime_error("evolve: integrator failed to converge (step underflow)");
    }

    FockState out;
    out.basis = psi0.basis;
    out.tail_loss = psi0.tail_loss;
    out.amplitudes = std::move(y);
    return out;
}

/// <N^(i)> for i = 1..l_max on one mode; diagonal in the occupation basis.
inline std::vector<double> measure_factorial_moments(const FockState& psi, int mode,
                                                     int l_max) {
    std::vector<double> moments(static_cast<std::size_t>(l_max), 0.0);
    const FockBasis& basis = *psi.basis;
    for (std::size_t idx = 0; idx < psi.amplitudes.size(); ++idx) {
        double w = std::norm(psi.amplitudes[idx]);
        if (w == 0.0) continue;
        double n = basis.occupation_of_mode(idx, mode);
        double falling = 1.0;
        for (int i = 0; i < l_max; ++i) {
            falling *= (n - i);
            if (falling <= 0.0) {
                falling = std::max(falling, 0.0);
            }
            moments[static_cast<std::size_t>(i)] += w * falling;
            if (falling == 0.0) break;
        }
    }
    return moments;
}

/// Expectation of a diagonal weighted occupation sum (e.g. 3 N_A + 2 N_B).
inline double expectation_occupation(const FockState& psi, const std::vector<double>& weights) {
    double e = 0.0;
    const FockBasis& basis = *psi.basis;
    for (std::size_t idx = 0; idx < psi.amplitudes.size(); ++idx) {
        double w = std::norm(psi.amplitudes[idx]);
        if (w == 0.0) continue;
        double v = 0.0;
        for (int m = 0; m < basis.n_modes(); ++m)
            v += weights[static_cast<std::size_t>(m)] * basis.occupation_of_mode(idx, m);
        e += w * v;
    }
    return e;
}

}  // namespace hoa
