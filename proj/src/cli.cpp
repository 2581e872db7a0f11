#include "omsim/cli.hpp"

#include "omsim/analytic.hpp"
#include "omsim/regression.hpp"
#include "omsim/steady.hpp"
#include "omsim/validate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace omsim {

namespace {

std::string fmt_full(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_flags(const std::vector<std::string>& flags) {
    if (flags.empty()) return "ok";
    std::string out;
    for (size_t i = 0; i < flags.size(); ++i) {
        if (i) out += ';';
        out += flags[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

std::array<int, 3> parse_dims(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw std::invalid_argument("dims must be three comma-separated integers");
    return {std::stoi(parts[0]), std::stoi(parts[1]), std::stoi(parts[2])};
}

std::string dims_to_string(const std::array<int, 3>& dims) {
    return std::to_string(dims[0]) + "," + std::to_string(dims[1]) + "," +
           std::to_string(dims[2]);
}

// Detuning unit: g when g > 0, kappa otherwise.
double delta_unit(const SystemParams& params) {
    return params.g > 0 ? params.g : params.kappa;
}

const char* delta_column(const SystemParams& params) {
    return params.g > 0 ? "delta_over_g" : "delta_over_kappa";
}

}  // namespace

std::vector<double> GridSpec::values() const {
    if (points < 1) throw std::invalid_argument("grid needs at least one point");
    std::vector<double> out;
    out.reserve(points);
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    if (log_scale) {
        if (min <= 0 || max <= 0) throw std::invalid_argument("log grid needs positive bounds");
        for (int i = 0; i < points; ++i) {
            out.push_back(min * std::pow(max / min, static_cast<double>(i) / (points - 1)));
        }
    } else {
        for (int i = 0; i < points; ++i) {
            out.push_back(min + (max - min) * static_cast<double>(i) / (points - 1));
        }
    }
    return out;
}

std::string GridSpec::to_string() const {
    std::string out = fmt_full(min) + ":" + fmt_full(max) + ":" + std::to_string(points);
    if (log_scale) out += ":log";
    return out;
}

GridSpec GridSpec::parse(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() < 3 || parts.size() > 4) {
        throw std::invalid_argument("grid spec must be min:max:points[:log]");
    }
    GridSpec spec;
    spec.min = std::stod(parts[0]);
    spec.max = std::stod(parts[1]);
    spec.points = std::stoi(parts[2]);
    spec.log_scale = parts.size() == 4 && parts[3] == "log";
    if (parts.size() == 4 && parts[3] != "log") {
        throw std::invalid_argument("grid scale must be 'log' when given");
    }
    return spec;
}

void RunConfig::finalize() {
    if (!dims_set) params.dims = SystemParams::default_dims(params.n_th);
    params.validate();
    if (command == "thermal" && params.n_th <= 0) {
        throw std::invalid_argument("thermal command requires --nth > 0");
    }
    if (command == "tau" || with_analytic) {
        static const std::vector<std::string> pairs{"aa", "ss", "RR", "as", "sa"};
        if (std::find(pairs.begin(), pairs.end(), pair) == pairs.end()) {
            throw std::invalid_argument("pair must be one of aa ss RR as sa");
        }
        if (command == "tau" && with_analytic && pair != "aa" && pair != "ss") {
            throw std::invalid_argument("analytic overlay is available for pairs aa and ss only");
        }
    }
}

std::string config_header(const RunConfig& config) {
    std::ostringstream out;
    out << "# omsim " << config.command << "\n";
    out << "# g = " << fmt_full(config.params.g) << "\n";
    out << "# gamma = " << fmt_full(config.params.gamma) << "\n";
    out << "# omega = " << fmt_full(config.params.omega) << "\n";
    out << "# nth = " << fmt_full(config.params.n_th) << "\n";
    out << "# dims = " << dims_to_string(config.params.dims) << "\n";
    out << "# grid = " << config.grid.to_string() << "\n";
    out << "# delta_over_g = " << fmt_full(config.delta_over_g) << "\n";
    out << "# pair = " << config.pair << "\n";
    out << "# tau_max = " << fmt_full(config.tau_max) << "\n";
    out << "# with_analytic = " << (config.with_analytic ? 1 : 0) << "\n";
    out << "# allow_strong_drive = " << (config.params.allow_strong_drive ? 1 : 0) << "\n";
    out << "# trunc_threshold = " << fmt_full(config.params.trunc_threshold) << "\n";
    return out.str();
}

RunConfig config_from_header(std::istream& in) {
    RunConfig config;
    bool saw_magic = false;
    std::string line;
    while (in.peek() == '#' && std::getline(in, line)) {
        if (!saw_magic) {
            std::istringstream first(line);
            std::string hash, name;
            first >> hash >> name >> config.command;
            if (hash != "#" || name != "omsim" || config.command.empty()) {
                throw std::invalid_argument("not an omsim header: " + line);
            }
            saw_magic = true;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
        };
        trim(key);
        trim(value);
        if (key == "g") config.params.g = std::stod(value);
        else if (key == "gamma") config.params.gamma = std::stod(value);
        else if (key == "omega") config.params.omega = std::stod(value);
        else if (key == "nth") config.params.n_th = std::stod(value);
        else if (key == "dims") { config.params.dims = parse_dims(value); config.dims_set = true; }
        else if (key == "grid") config.grid = GridSpec::parse(value);
        else if (key == "delta_over_g") config.delta_over_g = std::stod(value);
        else if (key == "pair") config.pair = value;
        else if (key == "tau_max") config.tau_max = std::stod(value);
        else if (key == "with_analytic") config.with_analytic = value == "1";
        else if (key == "allow_strong_drive") config.params.allow_strong_drive = value == "1";
        else if (key == "trunc_threshold") config.params.trunc_threshold = std::stod(value);
        // unknown keys (source, residual summaries) are informational
    }
    if (!saw_magic) throw std::invalid_argument("missing omsim header block");
    config.finalize();
    return config;
}

RunConfig config_from_header_text(const std::string& text) {
    std::istringstream in(text);
    return config_from_header(in);
}

namespace {

SteadyObservables analytic_point(const SystemParams& point) {
    if (point.n_th > 0) {
        return thermal_observables(point, thermal_cutoff(point.n_th));
    }
    return closed_form_observables(point);
}

struct SweepData {
    std::vector<SweepRow> rows;
    std::vector<SteadyObservables> analytic;  // empty unless requested
    double max_residual{0};
    size_t failed{0};
};

SweepData compute_sweep(const RunConfig& config) {
    SweepData data;
    const double unit = delta_unit(config.params);
    std::vector<double> deltas;
    for (double x : config.grid.values()) deltas.push_back(x * unit);
    data.rows = sweep(config.params, deltas);
    for (const SweepRow& row : data.rows) {
        data.max_residual = std::max(data.max_residual, row.residual);
        if (!row.error.empty()) ++data.failed;
    }
    if (config.with_analytic) {
        data.analytic.reserve(data.rows.size());
        for (const SweepRow& row : data.rows) {
            SystemParams point = config.params;
            point.delta = row.delta;
            data.analytic.push_back(analytic_point(point));
        }
    }
    return data;
}

}  // namespace

std::string render_sweep_csv(const RunConfig& config) {
    const SweepData data = compute_sweep(config);
    const double unit = delta_unit(config.params);
    const double n0 = config.params.n0();

    std::ostringstream out;
    out << config_header(config);
    out << "# source = " << (config.with_analytic ? "numeric+analytic" : "numeric") << "\n";
    out << "# max_solver_residual = " << fmt_full(data.max_residual) << "\n";
    out << delta_column(config.params)
        << ",n_a_over_n0,n_s_over_n0,n_R_over_n0,g2_aa,g2_ss,g2_RR,g2_tot,trunc_tail,flags";
    if (config.with_analytic) {
        out << ",n_a_over_n0_analytic,n_s_over_n0_analytic,n_R_over_n0_analytic"
            << ",g2_aa_analytic,g2_ss_analytic,g2_RR_analytic";
    }
    out << "\n";

    for (size_t i = 0; i < data.rows.size(); ++i) {
        const SweepRow& row = data.rows[i];
        auto flags = row.obs.flags;
        if (n0 == 0) flags.push_back("undefined_normalization");
        out << fmt_full(row.delta / unit) << "," << fmt_full(row.obs.n_a / n0) << ","
            << fmt_full(row.obs.n_s / n0) << "," << fmt_full(row.obs.n_R / n0) << ","
            << fmt_full(row.obs.g2_aa_0) << "," << fmt_full(row.obs.g2_ss_0) << ","
            << fmt_full(row.obs.g2_RR_0) << "," << fmt_full(row.obs.g2_tot_0) << ","
            << fmt_full(row.obs.trunc_tail) << "," << fmt_flags(flags);
        if (config.with_analytic) {
            const SteadyObservables& ana = data.analytic[i];
            out << "," << fmt_full(ana.n_a / n0) << "," << fmt_full(ana.n_s / n0) << ","
                << fmt_full(ana.n_R / n0) << "," << fmt_full(ana.g2_aa_0) << ","
                << fmt_full(ana.g2_ss_0) << "," << fmt_full(ana.g2_RR_0);
        }
        out << "\n";
    }
    return out.str();
}

std::string render_tau_csv(const RunConfig& config) {
    SystemParams point = config.params;
    point.delta = config.delta_over_g * delta_unit(config.params);

    const Liouvillian liou = liouvillian(point);
    const SteadySolution sol = solve_steady(liou);
    const std::vector<double> grid = default_tau_grid(point, config.tau_max);
    const CorrelationSeries series = g2_tau_pair(liou, sol.rho, config.pair, grid);

    CorrelationSeries analytic_series;
    if (config.with_analytic) {
        analytic_series =
            conditional_g2_tau(point, config.pair == "aa" ? Mode::a : Mode::s, grid);
    }

    std::ostringstream out;
    out << config_header(config);
    out << "# source = " << (config.with_analytic ? "numeric+analytic" : "numeric") << "\n";
    out << "# steady_residual = " << fmt_full(sol.residual) << "\n";
    out << "tau_kappa,g2,bound1_violated,bound2_violated";
    if (config.with_analytic) out << ",g2_analytic";
    out << "\n";
    for (size_t i = 0; i < series.tau_grid.size(); ++i) {
        out << fmt_full(series.tau_grid[i]) << "," << fmt_full(series.values[i]) << ","
            << (series.bound_violations[i].exceeds_g2_zero ? 1 : 0) << ","
            << (series.bound_violations[i].exceeds_coherence_distance ? 1 : 0);
        if (config.with_analytic) out << "," << fmt_full(analytic_series.values[i]);
        out << "\n";
    }
    return out.str();
}

std::string render_compare_report(const RunConfig& config) {
    RunConfig with = config;
    with.with_analytic = true;
    const SweepData data = compute_sweep(with);
    const double unit = delta_unit(config.params);
    const double n0 = config.params.n0();

    struct Extreme {
        double dev{0};
        double at{0};
        int count{0};
    };
    auto track = [](Extreme& e, double dev, double at) {
        ++e.count;
        if (dev > e.dev) {
            e.dev = dev;
            e.at = at;
        }
    };
    auto rel = [](double value, double reference) {
        return std::abs(value - reference) / std::abs(reference);
    };

    Extreme na, ns, g2a, g2s, g2a_zero, g2s_zero;
    for (size_t i = 0; i < data.rows.size(); ++i) {
        if (!data.rows[i].error.empty()) continue;
        const double at = data.rows[i].delta / unit;
        const SteadyObservables& num = data.rows[i].obs;
        const SteadyObservables& ana = data.analytic[i];
        track(na, rel(num.n_a / n0, ana.n_a / n0), at);
        track(ns, rel(num.n_s / n0, ana.n_s / n0), at);
        // relative where the analytic value is appreciable, absolute near
        // the antiresonance zeros where relative error is ill-conditioned
        if (ana.g2_aa_0 >= 0.05) track(g2a, rel(num.g2_aa_0, ana.g2_aa_0), at);
        else track(g2a_zero, std::abs(num.g2_aa_0 - ana.g2_aa_0), at);
        if (ana.g2_ss_0 >= 0.05) track(g2s, rel(num.g2_ss_0, ana.g2_ss_0), at);
        else track(g2s_zero, std::abs(num.g2_ss_0 - ana.g2_ss_0), at);
    }

    std::ostringstream out;
    out << config_header(config);
    out << "# source = numeric-vs-analytic\n";
    out << "quantity,measure,max_dev,at_" << delta_column(config.params) << ",points\n";
    auto line = [&](const char* name, const char* measure, const Extreme& e) {
        if (e.count == 0) return;
        out << name << "," << measure << "," << fmt_full(e.dev) << "," << fmt_full(e.at) << ","
            << e.count << "\n";
    };
    line("n_a_over_n0", "relative", na);
    line("n_s_over_n0", "relative", ns);
    line("g2_aa", "relative", g2a);
    line("g2_aa", "absolute_near_zero", g2a_zero);
    line("g2_ss", "relative", g2s);
    line("g2_ss", "absolute_near_zero", g2s_zero);
    return out.str();
}

std::string render_validate_report(const RunConfig& config, bool* all_passed) {
    ValidationOptions options;
    if (config.dims_set) options.dims_override = config.params.dims;
    if (config.params.omega != 0.01) options.omega_override = config.params.omega;
    options.allow_strong_drive = config.params.allow_strong_drive;
    const ValidationReport report = run_validation(options);

    std::ostringstream out;
    size_t passed = 0;
    for (const ValidationCheck& check : report.checks) {
        out << (check.passed ? "PASS " : "FAIL ") << check.name;
        if (!check.detail.empty()) out << ": " << check.detail;
        out << "\n";
        if (check.passed) ++passed;
    }
    out << "validation: " << passed << "/" << report.checks.size() << " checks passed\n";
    if (all_passed) *all_passed = report.all_passed();
    return out.str();
}

namespace {

void emit(const RunConfig& config, const std::string& text, std::ostream& out_stream,
          std::ostream& err_stream) {
    if (config.out.empty()) {
        out_stream << text;
        return;
    }
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + config.out);
    file << text;
    err_stream << "wrote " << config.out << "\n";
}

}  // namespace

int run_command(const RunConfig& config, std::ostream& out_stream, std::ostream& err_stream) {
    if (config.command == "sweep" || config.command == "thermal") {
        const std::string text = render_sweep_csv(config);
        emit(config, text, out_stream, err_stream);
        // total failure only if every grid point failed
        size_t failures = 0, rows = 0;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("delta", 0) == 0) continue;
            ++rows;
            if (line.find("solver_failure") != std::string::npos) ++failures;
        }
        return rows > 0 && failures == rows ? 1 : 0;
    }
    if (config.command == "tau") {
        emit(config, render_tau_csv(config), out_stream, err_stream);
        return 0;
    }
    if (config.command == "compare") {
        emit(config, render_compare_report(config), out_stream, err_stream);
        return 0;
    }
    if (config.command == "validate") {
        bool all_passed = false;
        const std::string text = render_validate_report(config, &all_passed);
        emit(config, text, out_stream, err_stream);
        return all_passed ? 0 : 2;
    }
    throw std::invalid_argument("unknown command " + config.command);
}

int cli_main(const std::vector<std::string>& args, std::ostream& out_stream,
             std::ostream& err_stream) {
    CLI::App app{
        "omsim: steady states, photon correlations, and delayed-coincidence "
        "statistics of a weakly driven two-mode optomechanical system"};
    app.require_subcommand(1);

    RunConfig config;
    config.params.gamma = 0.2;
    config.params.omega = 0.01;
    std::string grid_text = config.grid.to_string();
    std::string dims_text;

    auto add_common = [&](CLI::App* sub, bool g_required) {
        auto* g_opt = sub->add_option("--g", config.params.g, "coupling g/kappa");
        if (g_required) g_opt->required();
        sub->add_option("--gamma", config.params.gamma, "mechanical decay gamma/kappa")
            ->capture_default_str();
        sub->add_option("--omega", config.params.omega, "drive amplitude omega/kappa")
            ->capture_default_str();
        sub->add_option("--nth", config.params.n_th, "thermal phonon occupation")
            ->capture_default_str();
        sub->add_option("--dims", dims_text, "Fock truncations a,s,b (default per nth)");
        sub->add_option("--trunc-threshold", config.params.trunc_threshold,
                        "top-rung population flag threshold")
            ->capture_default_str();
        sub->add_flag("--allow-strong-drive", config.params.allow_strong_drive,
                      "disable the weak-drive guard");
        sub->add_option("--out", config.out, "output path (default stdout)");
    };

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "detuning sweep of steady-state observables");
    add_common(sweep_cmd, true);
    sweep_cmd->add_option("--grid", grid_text, "detuning grid min:max:points[:log], units of g")
        ->capture_default_str();
    sweep_cmd->add_flag("--with-analytic", config.with_analytic,
                        "append closed-form analytic columns");

    CLI::App* thermal_cmd =
        app.add_subcommand("thermal", "detuning sweep at finite thermal occupation");
    add_common(thermal_cmd, true);
    thermal_cmd->add_option("--grid", grid_text, "detuning grid min:max:points[:log]")
        ->capture_default_str();
    thermal_cmd->add_flag("--with-analytic", config.with_analytic,
                          "append thermal analytic columns");

    CLI::App* tau_cmd = app.add_subcommand("tau", "delayed coincidence g2(tau) series");
    add_common(tau_cmd, true);
    tau_cmd->add_option("--delta-over-g", config.delta_over_g,
                        "detuning in units of g (kappa if g = 0)")
        ->capture_default_str();
    tau_cmd->add_option("--pair", config.pair, "channel pair: aa ss RR as sa")
        ->capture_default_str();
    tau_cmd->add_option("--tau-max", config.tau_max, "last delay, units 1/kappa (default 5/gamma)");
    tau_cmd->add_flag("--with-analytic", config.with_analytic,
                      "overlay the conditional-amplitude g2(tau)");

    CLI::App* compare_cmd =
        app.add_subcommand("compare", "numeric vs analytic deviation report over a sweep");
    add_common(compare_cmd, true);
    compare_cmd->add_option("--grid", grid_text, "detuning grid min:max:points[:log]")
        ->capture_default_str();

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "run the cross-module invariant suite");
    add_common(validate_cmd, false);

    std::vector<const char*> argv{"omsim"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out_stream, err_stream);
    }

    try {
        const std::vector<std::pair<CLI::App*, const char*>> names{
            {sweep_cmd, "sweep"}, {thermal_cmd, "thermal"}, {tau_cmd, "tau"},
            {compare_cmd, "compare"}, {validate_cmd, "validate"}};
        for (const auto& [sub, name] : names) {
            if (sub->parsed()) config.command = name;
        }
        if (!dims_text.empty()) {
            config.params.dims = parse_dims(dims_text);
            config.dims_set = true;
        }
        config.grid = GridSpec::parse(grid_text);
        config.finalize();
        return run_command(config, out_stream, err_stream);
    } catch (const std::exception& e) {
        err_stream << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace omsim
