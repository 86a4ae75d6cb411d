// Command-line front end: derive short-time operator solutions, evaluate
// antibunching criteria, cross-check against the Fock-space oracle, and
// emit sweep datasets.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hoa/dsl.hpp"
#include "hoa/fock.hpp"
#include "hoa/moments.hpp"
#include "hoa/serialize.hpp"
#include "hoa/solver.hpp"
#include "hoa/system.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerifyFail = 2;
constexpr int kExitResource = 3;

struct RunConfig {
    std::string system_source = "six_wave";
    std::vector<std::string> systems;  // sweep may take several
    int order = 2;
    int l_max = 2;
    std::vector<double> g_values{1e-3};
    std::vector<double> t_values{1.0};
    std::vector<double> alpha_re{1.0};
    std::vector<double> alpha_im;
    std::vector<int> cutoffs;
    double tolerance = 1e-4;
    double slope_threshold = 1.8;
    std::string format = "pretty";
    std::string out_path;
    int workers = 1;
    bool latex = false;
    std::string operator_label;
};

hoa::SystemDef load_system(const std::string& source) {
    if (!source.empty() && source.front() == '@') {
        std::string path = source.substr(1);
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open DSL file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string name = path;
        if (auto slash = name.find_last_of('/'); slash != std::string::npos)
            name = name.substr(slash + 1);
        if (auto dot = name.find_last_of('.'); dot != std::string::npos)
            name = name.substr(0, dot);
        return hoa::parse_system(ss.str(), name);
    }
    return hoa::builtin_system(source);
}

std::vector<std::complex<double>> alpha_grid(const RunConfig& cfg) {
    std::vector<std::complex<double>> out;
    for (std::size_t i = 0; i < cfg.alpha_re.size(); ++i) {
        double im = i < cfg.alpha_im.size() ? cfg.alpha_im[i] : 0.0;
        out.emplace_back(cfg.alpha_re[i], im);
    }
    return out;
}

void write_output(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(cfg.out_path);
        if (!out) throw std::runtime_error("cannot write output file: " + cfg.out_path);
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
    }
}

std::string latex_poly(const hoa::OperatorPoly& p, const std::vector<std::string>& labels) {
    if (p.is_zero()) return "0";
    std::string s;
    for (const auto& [key, c] : p.terms()) {
        std::string piece = c.str();
        for (const auto& [name, exp] : key.second.powers) {
            piece += name;
            if (exp != 1) piece += "^{" + std::to_string(exp) + "}";
        }
        for (const auto& f : key.first.factors) {
            const std::string& lbl = labels[static_cast<std::size_t>(f.mode)];
            if (f.cr > 0) {
                piece += lbl + "^{\\dagger";
                if (f.cr > 1) piece += std::to_string(f.cr);
                piece += "}";
            }
            if (f.an > 0) {
                piece += lbl;
                if (f.an > 1) piece += "^{" + std::to_string(f.an) + "}";
            }
        }
        if (!s.empty()) s += " + ";
        s += piece;
    }
    return s;
}

int cmd_derive(const RunConfig& cfg) {
    hoa::SystemDef sys = load_system(cfg.system_source);
    std::string op = cfg.operator_label.empty()
                         ? sys.modes[static_cast<std::size_t>(sys.pump_mode())].label
                         : cfg.operator_label;
    hoa::TimeSeriesSolution sol = hoa::taylor_solve(sys, op, cfg.order);
    if (cfg.format == "json") {
        write_output(cfg, hoa::to_json(sol, sys.mode_labels()).dump(2));
    } else if (cfg.latex) {
        write_output(cfg, op + "(t) = " + latex_poly(sol.series, sys.mode_labels()));
    } else {
        std::string text = sys.name + ": " + op + "(t), order " + std::to_string(cfg.order) +
                           " (" + std::to_string(sol.series.size()) + " terms)\n";
        text += op + "(t) = " + sol.series.str(sys.mode_labels());
        write_output(cfg, text);
    }
    return kExitOk;
}

int cmd_hoa(const RunConfig& cfg) {
    hoa::SystemDef sys = load_system(cfg.system_source);
    std::string pump = sys.modes[static_cast<std::size_t>(sys.pump_mode())].label;
    hoa::TimeSeriesSolution sol = hoa::taylor_solve(sys, pump, cfg.order);
    hoa::MomentReport rep = hoa::make_moment_report(sys, sol, cfg.l_max);

    std::size_t negative = 0, total = 0;
    for (double g : cfg.g_values)
        for (double t : cfg.t_values)
            for (auto alpha : alpha_grid(cfg))
                for (int l = 1; l <= cfg.l_max; ++l) {
                    rep.numeric.push_back(hoa::eval_point(rep, l, g, t, alpha));
                    ++total;
                    if (rep.numeric.back().d < 0) ++negative;
                }

    if (cfg.format == "json") {
        write_output(cfg, hoa::to_json(rep).dump(2));
    } else if (cfg.format == "csv") {
        std::string text = hoa::csv_header_sweep() + "\n";
        for (const auto& pt : rep.numeric) text += hoa::csv_row(rep.system_name, pt) + "\n";
        write_output(cfg, text);
    } else {
        std::ostringstream out;
        out << "system " << rep.system_name << ", order " << rep.order << "\n";
        for (int l = 1; l <= cfg.l_max; ++l) {
            out << "d(" << l << ") = "
                << rep.d_values[static_cast<std::size_t>(l) - 1].str() << "\n";
        }
        for (const auto& pt : rep.numeric) {
            out << "  g=" << pt.g << " t=" << pt.t << " alpha=(" << pt.alpha.real() << ","
                << pt.alpha.imag() << ") l=" << pt.l << ": d=" << pt.d << " A=" << pt.A
                << " R=" << pt.R << "\n";
        }
        out << "antibunched (d<0) at " << negative << "/" << total << " grid points\n";
        write_output(cfg, out.str());
    }
    return kExitOk;
}

struct VerifyRow {
    double g, t;
    std::complex<double> alpha;
    int l;
    double symbolic, oracle, deviation;
    bool pass;
    double tail_loss, norm_drift;
};

VerifyRow verify_point(const hoa::SystemDef& sys, const hoa::MomentReport& rep,
                       const std::vector<int>& cutoffs, int l, double g, double t,
                       std::complex<double> alpha, double tolerance) {
    VerifyRow row{g, t, alpha, l, 0, 0, 0, false, 0, 0};
    hoa::Substitution subs{{{"g", g}, {"t", t}}};
    row.symbolic = rep.d_values.at(static_cast<std::size_t>(l) - 1).eval(subs, alpha).real();

    hoa::FockBasis basis(cutoffs);
    hoa::SparseHamiltonian h(basis, sys.h_int, subs);
    hoa::FockState psi0 = hoa::prepare_initial(sys, basis, alpha);
    row.tail_loss = psi0.tail_loss;
    hoa::FockState psi = hoa::evolve(h, psi0, t);
    row.norm_drift = std::abs(psi.norm() - 1.0);
    auto moments = hoa::measure_factorial_moments(psi, sys.pump_mode(), l + 1);
    row.oracle = moments[static_cast<std::size_t>(l)] -
                 std::pow(moments[0], static_cast<double>(l) + 1.0);

    double denom = std::abs(row.symbolic);
    if (denom < 1e-300) {
        row.deviation = std::abs(row.oracle - row.symbolic);
        row.pass = row.deviation < tolerance;
    } else {
        row.deviation = std::abs(row.oracle - row.symbolic) / denom;
        row.pass = row.deviation < tolerance;
    }
    return row;
}

int cmd_verify(const RunConfig& cfg) {
    hoa::SystemDef sys = load_system(cfg.system_source);
    std::string pump = sys.modes[static_cast<std::size_t>(sys.pump_mode())].label;
    hoa::TimeSeriesSolution sol = hoa::taylor_solve(sys, pump, cfg.order);
    hoa::MomentReport rep = hoa::make_moment_report(sys, sol, cfg.l_max);

    auto alphas = alpha_grid(cfg);
    double max_abs_alpha = 0;
    for (auto a : alphas) max_abs_alpha = std::max(max_abs_alpha, std::abs(a));
    std::vector<int> cutoffs =
        cfg.cutoffs.empty() ? hoa::default_cutoffs(sys, max_abs_alpha) : cfg.cutoffs;
    if (cutoffs.size() != sys.modes.size())
        throw CLI::ValidationError("--cutoffs needs one value per mode");

    bool all_pass = true;
    std::ostringstream out;
    out << "system " << sys.name << ", order " << cfg.order << ", tolerance " << cfg.tolerance
        << ", cutoffs";
    for (int c : cutoffs) out << " " << c;
    out << "\n";

    std::vector<std::pair<double, double>> gt_dev;  // (gt, deviation) for l = 1
    for (double g : cfg.g_values)
        for (double t : cfg.t_values)
            for (auto alpha : alphas)
                for (int l = 1; l <= cfg.l_max; ++l) {
                    VerifyRow row =
                        verify_point(sys, rep, cutoffs, l, g, t, alpha, cfg.tolerance);
                    all_pass = all_pass && row.pass;
                    if (l == 1 && g * t > 0) gt_dev.emplace_back(g * t, row.deviation);
                    out << "  g=" << row.g << " t=" << row.t << " l=" << row.l
                        << " symbolic=" << row.symbolic << " oracle=" << row.oracle
                        << " rel_dev=" << row.deviation << " tail=" << row.tail_loss
                        << " norm_drift=" << row.norm_drift
                        << (row.pass ? " PASS" : " FAIL") << "\n";
                }

    if (gt_dev.size() >= 3) {
        // least-squares slope of log(dev) vs log(gt)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t n = 0;
        for (auto [gt, dev] : gt_dev) {
            if (dev <= 0) continue;
            double x = std::log(gt), y = std::log(dev);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        if (n >= 3) {
            double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            bool ok = slope >= cfg.slope_threshold;
            all_pass = all_pass && ok;
            out << "convergence slope (d(1), log-log vs gt): " << slope
                << (ok ? " PASS" : " FAIL") << " (threshold " << cfg.slope_threshold << ")\n";
        }
    }

    out << (all_pass ? "verification PASSED" : "verification FAILED") << "\n";
    write_output(cfg, out.str());
    return all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_sweep(const RunConfig& cfg) {
    std::vector<std::string> sources =
        cfg.systems.empty() ? std::vector<std::string>{cfg.system_source} : cfg.systems;
    if (cfg.g_values.empty() || cfg.t_values.empty() || cfg.alpha_re.empty())
        throw CLI::ValidationError("sweep requires a nonempty g/t/alpha grid");

    struct Task {
        std::string system;
        int l;
        double g, t;
        std::complex<double> alpha;
    };
    std::vector<Task> tasks;
    std::vector<std::string> rows_text;

    std::string text = hoa::csv_header_sweep() + "\n";
    for (const auto& source : sources) {
        hoa::SystemDef sys = load_system(source);
        std::string pump = sys.modes[static_cast<std::size_t>(sys.pump_mode())].label;
        hoa::TimeSeriesSolution sol = hoa::taylor_solve(sys, pump, cfg.order);
        hoa::MomentReport rep = hoa::make_moment_report(sys, sol, cfg.l_max);

        std::vector<Task> sys_tasks;
        for (int l = 1; l <= cfg.l_max; ++l)
            for (double g : cfg.g_values)
                for (double t : cfg.t_values)
                    for (auto alpha : alpha_grid(cfg))
                        sys_tasks.push_back({sys.name, l, g, t, alpha});

        std::vector<std::string> rows(sys_tasks.size());
        int workers = std::max(1, cfg.workers);
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= sys_tasks.size()) break;
                const Task& tk = sys_tasks[i];
                hoa::NumericPoint pt = hoa::eval_point(rep, tk.l, tk.g, tk.t, tk.alpha);
                rows[i] = hoa::csv_row(tk.system, pt);
            }
        };
        std::vector<std::future<void>> futs;
        for (int w = 1; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, worker));
        worker();
        for (auto& f : futs) f.get();
        for (const auto& r : rows) text += r + "\n";
    }
    write_output(cfg, text);
    return kExitOk;
}

int cmd_parse_check(const RunConfig& cfg) {
    hoa::SystemDef sys = load_system(cfg.system_source);
    std::ostringstream out;
    out << "ok: system '" << sys.name << "', " << sys.modes.size() << " modes, "
        << sys.h_int.size() << " Hamiltonian terms\n";
    out << "H_int = " << sys.h_int.str(sys.mode_labels()) << "\n";
    write_output(cfg, out.str());
    return kExitOk;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("system")) cfg.system_source = j["system"].get<std::string>();
    if (j.contains("systems")) cfg.systems = j["systems"].get<std::vector<std::string>>();
    if (j.contains("order")) cfg.order = j["order"].get<int>();
    if (j.contains("l_max")) cfg.l_max = j["l_max"].get<int>();
    if (j.contains("g")) cfg.g_values = j["g"].get<std::vector<double>>();
    if (j.contains("t")) cfg.t_values = j["t"].get<std::vector<double>>();
    if (j.contains("alpha_re")) cfg.alpha_re = j["alpha_re"].get<std::vector<double>>();
    if (j.contains("alpha_im")) cfg.alpha_im = j["alpha_im"].get<std::vector<double>>();
    if (j.contains("cutoffs")) cfg.cutoffs = j["cutoffs"].get<std::vector<int>>();
    if (j.contains("tolerance")) cfg.tolerance = j["tolerance"].get<double>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--system", cfg.system_source,
                    "builtin name (six_wave, four_wave, shg) or @path to a DSL file");
    cmd->add_option("--order", cfg.order, "perturbative order in t")->check(CLI::Range(1, 8));
    cmd->add_option("--l", cfg.l_max, "highest antibunching order l")->check(CLI::Range(1, 6));
    cmd->add_option("--g", cfg.g_values, "coupling values");
    cmd->add_option("--t", cfg.t_values, "time values");
    cmd->add_option("--alpha-re", cfg.alpha_re, "pump amplitude real parts");
    cmd->add_option("--alpha-im", cfg.alpha_im, "pump amplitude imaginary parts");
    cmd->add_option("--cutoffs", cfg.cutoffs, "per-mode Fock cutoffs");
    cmd->add_option("--tolerance", cfg.tolerance, "relative tolerance for verification");
    cmd->add_option("--format", cfg.format, "output format: json, csv or pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));
    cmd->add_option("--out", cfg.out_path, "output file (default stdout)");
    cmd->add_option("--workers", cfg.workers, "concurrent sweep workers")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--config", config_path, "JSON config file mirroring these flags");
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* ceiling = std::getenv("HOA_TERM_CEILING")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(ceiling, &end, 10);
        if (end && *end == '\0' && v > 0) hoa::term_ceiling() = static_cast<std::size_t>(v);
    }

    CLI::App app{"Short-time Heisenberg solutions and higher-order antibunching criteria "
                 "for multimode bosonic interaction Hamiltonians"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto* derive = app.add_subcommand("derive", "derive the short-time operator solution");
    add_common_options(derive, cfg, config_path);
    derive->add_option("--operator", cfg.operator_label, "mode operator to evolve");
    derive->add_flag("--latex", cfg.latex, "render the series in LaTeX form");

    auto* hoa_cmd = app.add_subcommand("hoa", "symbolic and numeric antibunching criteria");
    add_common_options(hoa_cmd, cfg, config_path);

    auto* verify = app.add_subcommand("verify", "cross-check symbolic d(l) against the oracle");
    add_common_options(verify, cfg, config_path);
    verify->add_option("--slope-threshold", cfg.slope_threshold,
                       "minimum log-log convergence slope");

    auto* sweep = app.add_subcommand("sweep", "emit a plot-ready CSV parameter sweep");
    add_common_options(sweep, cfg, config_path);
    sweep->add_option("--systems", cfg.systems, "systems to include (overrides --system)");

    auto* parse_check = app.add_subcommand("parse-check", "parse and validate a DSL system");
    add_common_options(parse_check, cfg, config_path);

    try {
        app.parse(argc, argv);
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (derive->parsed()) return cmd_derive(cfg);
        if (hoa_cmd->parsed()) return cmd_hoa(cfg);
        if (verify->parsed()) return cmd_verify(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (parse_check->parsed()) return cmd_parse_check(cfg);
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const hoa::TermLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    } catch (const hoa::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("ceiling") != std::string::npos) return kExitResource;
        return kExitUsage;
    }
}
