#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace hoa {

/// Initial condition of one mode: vacuum, or a coherent state whose
/// amplitude is a named symbol (bound numerically at evaluation time).
struct InitialState {
    enum class Kind { Vacuum, Coherent };
    Kind kind = Kind::Vacuum;
    std::string amplitude_symbol;

    static InitialState vacuum() { return {}; }
    static InitialState coherent(std::string sym) {
        return {Kind::Coherent, std::move(sym)};
    }

    friend bool operator==(const InitialState&, const InitialState&) = default;
};

/// A named interaction Hamiltonian: mode list, interaction-picture h_int,
/// and per-mode frequency symbols kept as metadata (perfect resonance is
/// assumed, so they never enter the dynamics).
struct SystemDef {
    std::string name;
    std::vector<ModeId> modes;
    OperatorPoly h_int;
    std::map<int, std::string> frequency_symbols;
    std::vector<InitialState> initial_states;

    const ModeId& mode_by_label(const std::string& label) const {
        for (const auto& m : modes)
            if (m.label == label) return m;
        throw std::invalid_argument("unknown mode label: " + label);
    }

    std::optional<int> find_mode(const std::string& label) const {
        for (const auto& m : modes)
            if (m.label == label) return m.index;
        return std::nullopt;
    }

    /// The (single) coherent pump mode.
    int pump_mode() const {
        for (std::size_t i = 0; i < initial_states.size(); ++i)
            if (initial_states[i].kind == InitialState::Kind::Coherent)
                return modes[i].index;
        throw std::logic_error("system has no coherent pump mode");
    }

    std::vector<std::string> mode_labels() const {
        std::vector<std::string> out;
        for (const auto& m : modes) out.push_back(m.label);
        return out;
    }

    bool is_hermitian() const { return h_int.dagger() == h_int; }
};

namespace detail {

inline OperatorPoly coupling_pair(const RawProduct& half) {
    OperatorPoly h = normal_order(half);
    return h + h.dagger();
}

}  // namespace detail

/// The three builtin systems. Coherent pump in the first mode, vacuum
/// elsewhere; interaction picture with perfect resonance.
inline SystemDef builtin_system(const std::string& name) {
    SymbolMonomial g = SymbolMonomial::of("g");
    if (name == "six_wave") {
        // g (A†² B³ C + A² B†³ C†)
        RawProduct half;
        half.symbols = g;
        half.factors = {{0, true}, {0, true}, {1, false}, {1, false}, {1, false}, {2, false}};
        return {"six_wave",
                {{0, "A"}, {1, "B"}, {2, "C"}},
                detail::coupling_pair(half),
                {{0, "w1"}, {1, "w2"}, {2, "w3"}},
                {InitialState::coherent("alpha"), InitialState::vacuum(), InitialState::vacuum()}};
    }
    if (name == "four_wave") {
        // g (A†² B C + A² B† C†)
        RawProduct half;
        half.symbols = g;
        half.factors = {{0, true}, {0, true}, {1, false}, {2, false}};
        return {"four_wave",
                {{0, "A"}, {1, "B"}, {2, "C"}},
                detail::coupling_pair(half),
                {{0, "w1"}, {1, "w2"}, {2, "w3"}},
                {InitialState::coherent("alpha"), InitialState::vacuum(), InitialState::vacuum()}};
    }
    if (name == "shg") {
        // g (A2† A1² + A1†² A2), pump mode A1
        RawProduct half;
        half.symbols = g;
        half.factors = {{1, true}, {0, false}, {0, false}};
        return {"shg",
                {{0, "A1"}, {1, "A2"}},
                detail::coupling_pair(half),
                {{0, "w1"}, {1, "w2"}},
                {InitialState::coherent("alpha"), InitialState::vacuum()}};
    }
    throw std::invalid_argument("unknown builtin system: " + name +
                                " (expected six_wave, four_wave or shg)");
}

}  // namespace hoa
