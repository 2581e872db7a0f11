// Acceptance suite: end-to-end checks of the physics deliverables, one
// PASS/FAIL line per criterion. Exit status is the number of failures.

#include "omsim/analytic.hpp"
#include "omsim/cli.hpp"
#include "omsim/krylov.hpp"
#include "omsim/regression.hpp"
#include "omsim/steady.hpp"
#include "omsim/validate.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace omsim;

namespace {

struct Clause {
    bool passed;
    std::string text;
};

struct Criterion {
    int id;
    std::string title;
    std::vector<Clause> clauses;

    bool passed() const {
        for (const Clause& c : clauses) {
            if (!c.passed) return false;
        }
        return true;
    }
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1.0));
    return out;
}

std::vector<double> linear_grid(double dt, double end) {
    std::vector<double> out;
    for (double t = 0; t <= end + dt / 2; t += dt) out.push_back(t);
    return out;
}

// indices of strict local minima below a ceiling
std::vector<size_t> local_minima(const std::vector<double>& v, double ceiling) {
    std::vector<size_t> out;
    for (size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] < v[i - 1] && v[i] < v[i + 1] && v[i] < ceiling) out.push_back(i);
    }
    return out;
}

SystemParams fig2_params() {
    SystemParams p;
    p.g = 20;
    p.gamma = 0.2;
    p.omega = 0.01;
    p.dims = {4, 4, 4};
    return p;
}

SystemParams fig5_params() {
    SystemParams p;
    p.g = 8;
    p.gamma = 0.02;
    p.omega = 0.01;
    p.dims = {4, 4, 4};
    return p;
}

// ------------------------------------------------------------------------

Criterion criterion_1() {
    Criterion crit{1, "feature positions in the detuning sweep (401 points)", {}};
    SystemParams p = fig2_params();
    std::vector<double> deltas;
    for (double x : linspace(-1.0, 1.0, 401)) deltas.push_back(x * p.g);

    const auto start = std::chrono::steady_clock::now();
    const std::vector<SweepRow> rows = sweep(p, deltas);
    const double elapsed = seconds_since(start);

    auto delta_of = [&](size_t i) { return rows[i].delta / p.g; };
    auto argbest = [&](double lo, double hi, auto value, bool maximum) {
        size_t best = 0;
        bool first = true;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (delta_of(i) < lo || delta_of(i) > hi) continue;
            const double v = value(rows[i].obs);
            if (first || (maximum ? v > value(rows[best].obs) : v < value(rows[best].obs))) {
                best = i;
                first = false;
            }
        }
        return best;
    };
    auto n_a = [](const SteadyObservables& o) { return o.n_a; };
    auto g2_aa = [](const SteadyObservables& o) { return o.g2_aa_0; };

    const double na_plus = delta_of(argbest(0.3, 0.7, n_a, true));
    const double na_minus = delta_of(argbest(-0.7, -0.3, n_a, true));
    const double slack = 1e-9;  // grid values are one ulp off round numbers
    crit.clauses.push_back({std::abs(na_plus - 0.5) <= 0.005 + slack &&
                                std::abs(na_minus + 0.5) <= 0.005 + slack,
                            "n_a maxima at delta/g = " + fmt(na_minus) + ", " + fmt(na_plus) +
                                " (target +-0.5 +- 0.005)"});

    const double aa_center = delta_of(argbest(-0.15, 0.15, g2_aa, true));
    crit.clauses.push_back({std::abs(aa_center) <= 0.0051,
                            "g2_aa maximum at delta/g = " + fmt(aa_center) + " (target 0)"});

    const double aa_min = delta_of(argbest(0.2, 0.45, g2_aa, false));
    crit.clauses.push_back({std::abs(aa_min - 0.35355339) <= 0.01,
                            "g2_aa minimum at delta/g = " + fmt(aa_min) +
                                " (target 0.3536 +- 0.01)"});

    const double aa_two_photon = delta_of(argbest(0.5, 0.9, g2_aa, true));
    crit.clauses.push_back({std::abs(aa_two_photon - 0.61237244) <= 0.01,
                            "g2_aa maximum at delta/g = " + fmt(aa_two_photon) +
                                " (target 0.6124 +- 0.01)"});

    crit.clauses.push_back({elapsed < 120.0,
                            "sweep runtime " + fmt(elapsed, 3) + " s (target < 120 s)"});
    return crit;
}

Criterion criterion_2() {
    Criterion crit{2, "analytic vs numeric steady state at gamma = 0.002 kappa", {}};
    SystemParams p = fig2_params();
    p.gamma = 0.002;
    p.omega = 0.002;  // heating ~ omega^2/gamma must stay negligible

    double worst_n = 0, worst_g2_rel = 0, worst_g2_abs = 0;
    std::vector<double> deltas;
    for (double x : linspace(-1.0, 1.0, 81)) deltas.push_back(x * p.g);
    const std::vector<SweepRow> rows = sweep(p, deltas);
    for (const SweepRow& row : rows) {
        SystemParams q = p;
        q.delta = row.delta;
        const SteadyObservables lead = leading_order_observables(q);
        const SteadyObservables exact = closed_form_observables(q);
        worst_n = std::max({worst_n, std::abs(row.obs.n_a - lead.n_a) / lead.n_a,
                            std::abs(row.obs.n_s - lead.n_s) / lead.n_s});
        for (auto [num, ana] : {std::pair{row.obs.g2_aa_0, exact.g2_aa_0},
                                std::pair{row.obs.g2_ss_0, exact.g2_ss_0}}) {
            const double abs_dev = std::abs(num - ana);
            if (abs_dev > 0.02) {
                worst_g2_rel = std::max(worst_g2_rel, abs_dev / std::abs(ana));
            } else {
                worst_g2_abs = std::max(worst_g2_abs, abs_dev);
            }
        }
    }
    crit.clauses.push_back({worst_n <= 0.02, "occupations within " + fmt(100 * worst_n, 3) +
                                                 "% of the closed forms (target 2%)"});
    crit.clauses.push_back(
        {worst_g2_rel <= 0.05, "correlations within " + fmt(100 * worst_g2_rel, 3) +
                                   "% relative / " + fmt(worst_g2_abs, 3) +
                                   " absolute near zeros (targets 5%, 0.02)"});
    return crit;
}

Criterion criterion_3() {
    Criterion crit{3, "resonant transmission value", {}};
    SystemParams p = fig2_params();
    p.gamma = 0.002;
    p.omega = 0.002;
    p.delta = p.g / 2;
    const SteadyObservables obs = observables(steady_state(liouvillian(p)), p);
    const double ratio = obs.n_a / p.n0();
    crit.clauses.push_back({std::abs(ratio - 0.252) <= 0.005,
                            "n_a/n0 at delta = g/2 is " + fmt(ratio) +
                                " (target 0.252 +- 0.005)"});
    return crit;
}

Criterion criterion_4() {
    Criterion crit{4, "two-photon interference cancellation at delta = 0", {}};
    SystemParams p = fig2_params();
    p.delta = 0;
    const TwoPhotonRabi rate = two_photon_rabi(p);
    const double bound = 1e-12 * p.omega * p.omega / p.g;
    crit.clauses.push_back({!rate.divergent && std::abs(rate.value) <= bound,
                            "|two-photon rate| = " + fmt(std::abs(rate.value), 3) +
                                " (target <= " + fmt(bound, 3) + ")"});

    const SteadyObservables obs = observables(steady_state(liouvillian(p)), p);
    crit.clauses.push_back({std::abs(obs.g2_tot_0 - 1.0) <= 0.05,
                            "g2_tot(0) = " + fmt(obs.g2_tot_0) + " (target 1 +- 5%)"});
    return crit;
}

Criterion criterion_5() {
    Criterion crit{5, "rabi zeros of the delayed driven-mode correlation", {}};
    SystemParams p = fig5_params();
    p.delta = 0;
    const double dt = 0.02 / p.g;
    const std::vector<double> grid = linear_grid(dt, 8.0);

    const Liouvillian liou = liouvillian(p);
    const DensityMatrix rho = steady_state(liou);
    const CorrelationSeries numeric = g2_tau_pair(liou, rho, "aa", grid);
    const CorrelationSeries analytic = conditional_g2_tau(p, Mode::a, grid);

    const auto num_min = local_minima(numeric.values, 1e-2);
    const auto ana_min = local_minima(analytic.values, 1e-2);
    crit.clauses.push_back({num_min.size() >= 2, "numeric minima below 1e-2: " +
                                                     std::to_string(num_min.size()) +
                                                     " (target >= 2)"});

    bool aligned = num_min.size() >= 2 && ana_min.size() >= num_min.size();
    std::string positions;
    for (size_t k = 0; aligned && k < num_min.size(); ++k) {
        const double gap = std::abs(grid[num_min[k]] - grid[ana_min[k]]);
        aligned = gap <= dt * 1.5;
        positions += (k ? ", " : "") + fmt(grid[num_min[k]], 4) + "~" +
                     fmt(grid[ana_min[k]], 4);
    }
    crit.clauses.push_back(
        {aligned, "zeros match the analytic amplitude evolution within one grid step (" +
                      positions + ")"});

    if (num_min.size() >= 2 && ana_min.size() >= 2) {
        const double num_spacing = grid[num_min[1]] - grid[num_min[0]];
        const double ana_spacing = grid[ana_min[1]] - grid[ana_min[0]];
        crit.clauses.push_back(
            {std::abs(num_spacing - ana_spacing) <= dt * 1.5,
             "consecutive zero spacing " + fmt(num_spacing, 4) + " vs analytic " +
                 fmt(ana_spacing, 4) + " (order 2 pi/g = " + fmt(2 * M_PI / p.g, 4) + ")"});
    } else {
        crit.clauses.push_back({false, "not enough zeros to compare spacing"});
    }
    return crit;
}

Criterion criterion_6() {
    Criterion crit{6, "delayed bunching violates the classical bound", {}};
    SystemParams p = fig5_params();
    p.delta = p.g / std::sqrt(2.0);
    const Liouvillian liou = liouvillian(p);
    const DensityMatrix rho = steady_state(liou);
    const CorrelationSeries series = g2_tau_pair(liou, rho, "aa", linear_grid(0.01, 5.0));
    size_t flagged = 0;
    double peak = 0;
    for (size_t i = 0; i < series.values.size(); ++i) {
        if (series.bound_violations[i].exceeds_g2_zero) {
            ++flagged;
            peak = std::max(peak, series.values[i]);
        }
    }
    crit.clauses.push_back({flagged > 0, std::to_string(flagged) +
                                             " flagged points with g2(tau) > g2(0) = " +
                                             fmt(series.g2_zero) + ", peak " + fmt(peak)});
    return crit;
}

Criterion criterion_7() {
    Criterion crit{7, "heralded-phonon tail of the undriven mode", {}};
    SystemParams p = fig5_params();
    p.delta = p.g / std::sqrt(2.0);
    const Liouvillian liou = liouvillian(p);
    const DensityMatrix rho = steady_state(liou);

    std::vector<double> grid = linear_grid(0.01, 5.0);
    const double tail_end = 2.0 / p.gamma;
    const double fit_start = 5.0;
    for (int i = 1; i <= 120; ++i) {
        grid.push_back(fit_start * std::pow(tail_end / fit_start, i / 120.0));
    }
    const CorrelationSeries series = g2_tau_pair(liou, rho, "ss", grid);

    // least-squares fit of ln(g2 - 1) over tau in [5/kappa, 2/gamma]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < fit_start || grid[i] > tail_end || series.values[i] <= 1.0) continue;
        const double x = grid[i], y = std::log(series.values[i] - 1.0);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double rate = -slope;
    crit.clauses.push_back({std::abs(rate - p.gamma) <= 0.1 * p.gamma,
                            "tail relaxation rate " + fmt(rate) + " vs gamma = " +
                                fmt(p.gamma) + " (target within 10%)"});

    const ConditionalState cond = conditional_state(rho, Mode::s);
    const int idx = rho.space.index_of(0, 0, 1);
    const double weight = cond.rho_c.mat(idx, idx).real();
    crit.clauses.push_back(
        {weight > 0.99,
         "post-jump |001> weight " + fmt(weight) +
             " (target > 0.99; the mechanical-decay sideband holds gamma/(2 kappa) ~ 1% "
             "and drive heating ~ 0.2%, so this stated threshold is not reachable at "
             "gamma = 0.02 kappa)"});
    return crit;
}

// Near delta = 0 the one-photon occupations are interference-suppressed
// far below the thermal weight of the top phonon rung, whose cut ladder
// does not interfere; the phonon space must be deep enough that this
// truncation artifact stays below the comparison tolerance.
int phonon_depth(double n_th, double abs_delta_over_g) {
    const double x = abs_delta_over_g;
    if (n_th > 1.5) {
        if (x < 0.05) return 36;
        if (x < 0.125) return 33;
        if (x < 0.25) return 28;
        if (x < 0.45) return 22;
        return 16;
    }
    if (x < 0.05) return 25;
    if (x < 0.125) return 22;
    if (x < 0.25) return 19;
    if (x < 0.45) return 16;
    return 12;
}

Criterion criterion_8() {
    Criterion crit{8, "thermal model vs full numerics (n_th = 1, 2)", {}};
    for (double n_th : {1.0, 2.0}) {
        SystemParams p = fig2_params();
        p.gamma = 0.001;
        p.n_th = n_th;
        p.trunc_threshold = 0.01;  // thermal top-rung population is ~0.1%, not an error
        const int n_max = thermal_cutoff(n_th);

        // group the grid into bands of equal phonon depth, one sweep per band
        std::vector<SweepRow> rows;
        std::vector<double> pending;
        int pending_depth = -1;
        auto flush = [&] {
            if (pending.empty()) return;
            SystemParams band = p;
            band.dims = {3, 3, pending_depth};
            for (SweepRow& row : sweep(band, pending)) rows.push_back(std::move(row));
            pending.clear();
        };
        for (double x : linspace(-1.0, 1.0, 81)) {
            const int depth = phonon_depth(n_th, std::abs(x));
            if (depth != pending_depth) {
                flush();
                pending_depth = depth;
            }
            pending.push_back(x * p.g);
        }
        flush();

        double worst_rel = 0, worst_abs = 0;
        for (const SweepRow& row : rows) {
            SystemParams q = p;
            q.delta = row.delta;
            const SteadyObservables ana = thermal_observables(q, n_max);
            for (auto [num, ref] : {std::pair{row.obs.n_a, ana.n_a},
                                    std::pair{row.obs.n_s, ana.n_s},
                                    std::pair{row.obs.g2_aa_0, ana.g2_aa_0},
                                    std::pair{row.obs.g2_ss_0, ana.g2_ss_0}}) {
                const double abs_dev = std::abs(num - ref);
                if (abs_dev > 0.02) {
                    worst_rel = std::max(worst_rel, abs_dev / std::abs(ref));
                } else {
                    worst_abs = std::max(worst_abs, abs_dev);
                }
            }
        }
        crit.clauses.push_back({worst_rel <= 0.05,
                                "n_th = " + fmt(n_th, 2) + ": agreement " +
                                    fmt(100 * worst_rel, 3) + "% relative, " +
                                    fmt(worst_abs, 3) + " absolute near zeros (target 5%)"});

        // subspace-n one-photon resonance at (g/2) sqrt(n+1): the n = 1
        // replica sits at delta/g = 1/sqrt(2)
        size_t best = 0;
        bool first = true;
        for (size_t i = 0; i < rows.size(); ++i) {
            const double x = rows[i].delta / p.g;
            if (x < 0.6 || x > 0.8) continue;
            if (first || rows[i].obs.n_a > rows[best].obs.n_a) {
                best = i;
                first = false;
            }
        }
        const double replica = rows[best].delta / p.g;
        const double step = 2.0 / 80.0;
        crit.clauses.push_back({std::abs(replica - 1.0 / std::sqrt(2.0)) <= step,
                                "n_th = " + fmt(n_th, 2) +
                                    ": extra transmission resonance at delta/g = " +
                                    fmt(replica) + " (target 0.7071 within grid step)"});
    }
    return crit;
}

Criterion criterion_9() {
    Criterion crit{9, "cross-module invariant suite via validate", {}};
    const auto start = std::chrono::steady_clock::now();
    const ValidationReport report = run_validation({});
    const double elapsed = seconds_since(start);
    size_t passed = 0;
    std::string failures;
    for (const ValidationCheck& check : report.checks) {
        if (check.passed) {
            ++passed;
        } else {
            failures += " " + check.name;
        }
    }
    crit.clauses.push_back({report.all_passed(),
                            std::to_string(passed) + "/" + std::to_string(report.checks.size()) +
                                " invariants passed" +
                                (failures.empty() ? "" : " (failed:" + failures + ")")});
    crit.clauses.push_back({elapsed < 300.0,
                            "validation runtime " + fmt(elapsed, 3) + " s (target < 300 s)"});
    return crit;
}

}  // namespace

int main() {
    const std::vector<std::function<Criterion()>> criteria = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9};

    int failures = 0;
    for (const auto& make : criteria) {
        Criterion crit = make();
        const bool ok = crit.passed();
        if (!ok) ++failures;
        std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", crit.id,
                    crit.title.c_str());
        for (const Clause& clause : crit.clauses) {
            std::printf("        %s %s\n", clause.passed ? "ok " : "BAD", clause.text.c_str());
        }
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
    return failures;
}
