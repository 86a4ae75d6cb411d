#pragma once

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "amplitude.hpp"
#include "moments.hpp"
#include "solver.hpp"
#include "system.hpp"

namespace hoa {

using nlohmann::json;

namespace detail {

inline json int_json(const boost::multiprecision::cpp_int& v) {
    if (v >= std::numeric_limits<std::int64_t>::min() &&
        v <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(v);
    return v.str();
}

inline boost::multiprecision::cpp_int int_from_json(const json& j) {
    if (j.is_string()) return boost::multiprecision::cpp_int(j.get<std::string>());
    return boost::multiprecision::cpp_int(j.get<std::int64_t>());
}

inline json coeff_json(const GaussianRational& c, const SymbolMonomial& sym) {
    json symbols = json::object();
    for (const auto& [name, exp] : sym.powers) symbols[name] = exp;
    return {{"re_num", int_json(boost::multiprecision::numerator(c.re))},
            {"re_den", int_json(boost::multiprecision::denominator(c.re))},
            {"im_num", int_json(boost::multiprecision::numerator(c.im))},
            {"im_den", int_json(boost::multiprecision::denominator(c.im))},
            {"symbols", symbols}};
}

inline std::pair<GaussianRational, SymbolMonomial> coeff_from_json(const json& j) {
    GaussianRational c{Rational(int_from_json(j.at("re_num")), int_from_json(j.at("re_den"))),
                       Rational(int_from_json(j.at("im_num")), int_from_json(j.at("im_den")))};
    SymbolMonomial sym;
    for (const auto& [name, exp] : j.at("symbols").items())
        sym.powers[name] = exp.get<int>();
    return {c, sym};
}

}  // namespace detail

/// Stable JSON form of an OperatorPoly: entries in canonical term order so
/// serialized files are diffable.
inline json to_json(const OperatorPoly& p, const std::vector<std::string>& mode_labels) {
    json out = json::array();
    for (const auto& [key, coeff] : p.terms()) {
        json modes = json::array();
        for (const auto& f : key.first.factors)
            modes.push_back({{"label", mode_labels[static_cast<std::size_t>(f.mode)]},
                             {"cr", f.cr},
                             {"an", f.an}});
        out.push_back({{"modes", modes}, {"coeff", detail::coeff_json(coeff, key.second)}});
    }
    return out;
}

inline OperatorPoly operator_poly_from_json(const json& j,
                                            const std::vector<std::string>& mode_labels) {
    auto mode_index = [&](const std::string& label) {
        for (std::size_t i = 0; i < mode_labels.size(); ++i)
            if (mode_labels[i] == label) return static_cast<int>(i);
        throw std::invalid_argument("unknown mode label in JSON: " + label);
    };
    OperatorPoly p;
    for (const auto& entry : j) {
        NormalMonomial mono;
        for (const auto& f : entry.at("modes"))
            mono.factors.push_back({mode_index(f.at("label").get<std::string>()),
                                    f.at("cr").get<int>(), f.at("an").get<int>()});
        std::sort(mono.factors.begin(), mono.factors.end());
        auto [c, sym] = detail::coeff_from_json(entry.at("coeff"));
        p.add_term(std::move(mono), sym, c);
    }
    return p;
}

inline json to_json(const SystemDef& sys) {
    json modes = json::array();
    for (std::size_t i = 0; i < sys.modes.size(); ++i) {
        const auto& init = sys.initial_states[i];
        json m = {{"label", sys.modes[i].label},
                  {"index", sys.modes[i].index},
                  {"frequency", sys.frequency_symbols.at(sys.modes[i].index)},
                  {"initial", init.kind == InitialState::Kind::Coherent ? "coherent" : "vacuum"}};
        if (init.kind == InitialState::Kind::Coherent) m["amplitude"] = init.amplitude_symbol;
        modes.push_back(m);
    }
    return {{"name", sys.name}, {"modes", modes}, {"h_int", to_json(sys.h_int, sys.mode_labels())}};
}

inline json to_json(const TimeSeriesSolution& sol, const std::vector<std::string>& mode_labels) {
    return {{"system", sol.system_name},
            {"operator", sol.operator_label},
            {"order", sol.order},
            {"series", to_json(sol.series, mode_labels)}};
}

inline json to_json(const AmplitudePoly& p) {
    json out = json::array();
    for (const auto& [key, poly] : p.terms)
        for (const auto& [sym, c] : poly.terms)
            out.push_back({{"alpha_star", key.first},
                           {"alpha", key.second},
                           {"coeff", detail::coeff_json(c, sym)}});
    return out;
}

inline json to_json(const MomentReport& rep) {
    json moments = json::array(), means = json::array(), ds = json::array();
    for (const auto& m : rep.moments) moments.push_back(to_json(m));
    for (const auto& m : rep.mean_powers) means.push_back(to_json(m));
    for (const auto& d : rep.d_values) ds.push_back(to_json(d));
    json numeric = json::array();
    for (const auto& pt : rep.numeric)
        numeric.push_back({{"g", pt.g},
                           {"t", pt.t},
                           {"alpha_re", pt.alpha.real()},
                           {"alpha_im", pt.alpha.imag()},
                           {"l", pt.l},
                           {"d", pt.d},
                           {"A", pt.A},
                           {"R", pt.R}});
    return {{"system", rep.system_name}, {"order", rep.order},       {"l_max", rep.l_max},
            {"moments", moments},        {"mean_powers", means},     {"d_values", ds},
            {"numeric", numeric}};
}

inline std::string csv_header_sweep() {
    return "system,l,g,t,alpha_re,alpha_im,d_l,A_l,R_l1";
}

inline std::string csv_row(const std::string& system, const NumericPoint& pt) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  system.c_str(), pt.l, pt.g, pt.t, pt.alpha.real(), pt.alpha.imag(), pt.d,
                  pt.A, pt.R);
    return buf;
}

}  // namespace hoa
