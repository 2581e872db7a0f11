#include "omsim/analytic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>

namespace omsim {

namespace {

constexpr Complex kImag{0.0, 1.0};
const double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

AnalyticContext analytic_context(const SystemParams& params) {
    params.validate();
    const Complex kappa_tilde(params.kappa, -params.delta);
    return {params.omega / kappa_tilde, params.g / (4.0 * kappa_tilde), kappa_tilde};
}

double r_factor(double big_k, double delta, double w) {
    const double k2 = big_k * big_k;
    return (k2 + (delta - w) * (delta - w)) * (k2 + (delta + w) * (delta + w));
}

AmplitudeState steady_amplitudes(const SystemParams& params) {
    const auto ctx = analytic_context(params);
    const Complex x2 = ctx.x * ctx.x;
    const Complex d1 = 1.0 + 4.0 * x2;
    const Complex d2 = 1.0 + 6.0 * x2;
    const Complex a2 = ctx.alpha * ctx.alpha;
    AmplitudeState amps;
    amps.a000 = 1.0;
    amps.a100 = -kImag * ctx.alpha / d1;
    amps.a011 = -ctx.alpha * 2.0 * ctx.x / d1;
    amps.a200 = -(a2 / std::sqrt(2.0)) * (1.0 + 2.0 * x2) / (d1 * d2);
    amps.a111 = kImag * a2 * 2.0 * ctx.x / (d1 * d2);
    amps.a022 = a2 * 4.0 * x2 / (d1 * d2);
    return amps;
}

std::array<Complex, 6> amplitude_equation_residual(const SystemParams& params,
                                                   const AmplitudeState& amps) {
    const Complex kt(params.kappa, -params.delta);
    const double g = params.g;
    const double om = params.omega;
    const double rt2 = std::sqrt(2.0);
    return {
        Complex{0.0},
        -kImag * (g / 2) * amps.a011 - kImag * om * amps.a000 - kt * amps.a100,
        -kImag * (g / 2) * amps.a100 - kt * amps.a011,
        -kImag * (g / rt2) * amps.a111 - kImag * rt2 * om * amps.a100 - 2.0 * kt * amps.a200,
        -kImag * (g / rt2) * amps.a200 - kImag * g * amps.a022 - kImag * om * amps.a011 -
            2.0 * kt * amps.a111,
        -kImag * g * amps.a111 - 2.0 * kt * amps.a022,
    };
}

SubspaceAmplitudes subspace_amplitudes(const SystemParams& params, int n_phonons) {
    if (n_phonons < 0) throw std::invalid_argument("subspace_amplitudes: n < 0");
    const auto ctx = analytic_context(params);
    const Complex kt = ctx.kappa_tilde;
    const Complex kt2 = kt * kt;
    const double g = params.g;
    const double om = params.omega;
    const double np1 = n_phonons + 1.0;
    const double np2 = n_phonons + 2.0;

    // One-photon sector: splitting enhanced to (g/2) sqrt(n+1).
    const Complex one_ph = kt2 + np1 * g * g / 4.0;
    SubspaceAmplitudes amps;
    amps.a_10n = -kImag * om * kt / one_ph;
    amps.a_01n1 = -kImag * (g / 2) * std::sqrt(np1) * amps.a_10n / kt;

    // Two-photon sector.
    const Complex two_ph = kt2 + (2.0 * n_phonons + 3.0) * g * g / 8.0;
    amps.a_20n = -kImag * (om / std::sqrt(2.0)) * amps.a_10n * (kt2 + g * g / 8.0) /
                 (kt * two_ph);
    amps.a_11n1 = -(g * std::sqrt(np1) / 2.0) * om * amps.a_10n / two_ph;
    amps.a_02n2 = kImag * g * g * std::sqrt(np1 * np2) * om * amps.a_10n /
                  (4.0 * std::sqrt(2.0) * kt * two_ph);
    return amps;
}

namespace {

struct SubspaceDensities {
    double p10, p01, p20, p02;
};

SubspaceDensities subspace_densities(const SystemParams& params, int n_phonons) {
    const SubspaceAmplitudes amps = subspace_amplitudes(params, n_phonons);
    return {std::norm(amps.a_10n), std::norm(amps.a_01n1), std::norm(amps.a_20n),
            std::norm(amps.a_02n2)};
}

}  // namespace

SteadyObservables closed_form_observables(const SystemParams& params) {
    const SubspaceDensities d = subspace_densities(params, 0);
    SteadyObservables out;
    out.n_a = d.p10;
    out.n_s = d.p01;
    out.g2_aa_0 = 2.0 * d.p20 / (d.p10 * d.p10);
    out.g2_ss_0 = 2.0 * d.p02 / (d.p01 * d.p01);

    const SubspaceAmplitudes amps = subspace_amplitudes(params, 0);
    const double beta = params.omega / params.kappa;
    const Complex refl_mean = amps.a_10n + kImag * beta;
    out.n_R = std::norm(refl_mean);
    const Complex refl_pair =
        -beta * beta + 2.0 * kImag * beta * amps.a_10n + std::sqrt(2.0) * amps.a_20n;
    out.g2_RR_0 = std::norm(refl_pair) / (out.n_R * out.n_R);

    out.g2_tot_0 = kNan;
    out.trunc_tail = 0;
    return out;
}

SteadyObservables leading_order_observables(const SystemParams& params) {
    params.validate();
    const double g = params.g;
    const double k = params.kappa;
    const double delta = params.delta;
    const double n0 = params.n0();
    const double rk_0 = r_factor(k, delta, 0);
    const double rk_half = r_factor(k, delta, g / 2);
    const double rk_sqrt8 = r_factor(k, delta, g / std::sqrt(8.0));
    const double rk_d = r_factor(k, delta, std::sqrt(6.0) * g / 4.0);
    const double rhalf_half = r_factor(k / 2, delta, g / 2);

    SteadyObservables out;
    out.n_a = n0 * k * k * std::sqrt(rk_0) / rk_half;
    out.n_s = n0 * g * g * k * k / (4.0 * rk_half);
    out.n_R = n0 * (rhalf_half * rhalf_half) / (rk_half * rk_half);
    out.g2_aa_0 = rk_sqrt8 * rk_half / (rk_0 * rk_d);
    out.g2_ss_0 = 2.0 * rk_half / rk_d;
    if (g > 0) {
        out.g2_RR_0 = rk_half *
                      r_factor(16.0 * k * k * k / (g * g), delta, g / 2 - 2.0 * k * k / g) /
                      (rhalf_half * rhalf_half);
    } else {
        out.g2_RR_0 = 1.0;
    }
    out.g2_tot_0 = kNan;
    out.trunc_tail = 0;
    return out;
}

double thermal_weight(double n_th, int n) {
    if (n_th < 0 || n < 0) throw std::invalid_argument("thermal_weight: bad arguments");
    double zeta = 1.0 / (1.0 + n_th);
    const double ratio = n_th / (1.0 + n_th);
    for (int i = 0; i < n; ++i) zeta *= ratio;
    return zeta;
}

int thermal_cutoff(double n_th, double coverage_eps) {
    if (n_th <= 0) return 0;
    // Tail mass above n is (n_th / (1 + n_th))^(n+1).
    const double ratio = n_th / (1.0 + n_th);
    return static_cast<int>(std::ceil(std::log(coverage_eps) / std::log(ratio)));
}

SteadyObservables thermal_observables(const SystemParams& params, int n_max) {
    if (n_max < 0) throw std::invalid_argument("thermal_observables: n_max < 0");
    double covered = 0;
    for (int n = 0; n <= n_max; ++n) covered += thermal_weight(params.n_th, n);
    if (covered < 1.0 - 1e-8) {
        throw CutoffError("thermal phonon cutoff too small: covered weight " +
                          std::to_string(covered) + " at n_max " + std::to_string(n_max));
    }

    double n_a = 0, n_s = 0, pair_a = 0, pair_s = 0;
    double zeta = 1.0 / (1.0 + params.n_th);
    const double ratio = params.n_th / (1.0 + params.n_th);
    for (int n = 0; n <= n_max; ++n) {
        const SubspaceDensities d = subspace_densities(params, n);
        n_a += zeta * d.p10;
        n_s += zeta * d.p01;
        pair_a += zeta * d.p20;
        pair_s += zeta * d.p02;
        zeta *= ratio;
    }

    SteadyObservables out;
    out.n_a = n_a;
    out.n_s = n_s;
    out.g2_aa_0 = 2.0 * pair_a / (n_a * n_a);
    out.g2_ss_0 = 2.0 * pair_s / (n_s * n_s);
    out.n_R = kNan;
    out.g2_RR_0 = kNan;
    out.g2_tot_0 = kNan;
    out.trunc_tail = std::max(1.0 - covered, 0.0);
    return out;
}

TwoPhotonRabi two_photon_rabi(const SystemParams& params) {
    if (params.g <= 0) throw std::invalid_argument("two_photon_rabi: requires g > 0");
    params.validate();

    // Explicit eigenstates in a [3,3,3] space: |1+->, |1-->, |2_0>.
    const HilbertSpace space = make_space({3, 3, 3});
    const int dim = space.total_dim;
    const double rt2 = std::sqrt(2.0);
    const double rt3 = std::sqrt(3.0);
    Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(dim);
    ground(space.index_of(0, 0, 0)) = 1.0;
    Eigen::VectorXcd one_plus = Eigen::VectorXcd::Zero(dim);
    one_plus(space.index_of(1, 0, 0)) = 1.0 / rt2;
    one_plus(space.index_of(0, 1, 1)) = 1.0 / rt2;
    Eigen::VectorXcd one_minus = Eigen::VectorXcd::Zero(dim);
    one_minus(space.index_of(1, 0, 0)) = 1.0 / rt2;
    one_minus(space.index_of(0, 1, 1)) = -1.0 / rt2;
    Eigen::VectorXcd two_dark = Eigen::VectorXcd::Zero(dim);
    two_dark(space.index_of(2, 0, 0)) = rt2 / rt3;
    two_dark(space.index_of(0, 2, 2)) = -1.0 / rt3;

    const QOperator ca = annihilation(space, Mode::a);
    const SparseMatrix drive = params.omega * SparseMatrix(SparseMatrix(ca.mat.adjoint()) + ca.mat);

    const double w_plus = -params.delta + params.g / 2;
    const double w_minus = -params.delta - params.g / 2;
    TwoPhotonRabi out;
    if (std::min(std::abs(w_plus), std::abs(w_minus)) <= 1e-12 * params.g) {
        out.divergent = true;
        out.value = Complex(kNan, kNan);
        return out;
    }
    const Complex via_plus = two_dark.dot(drive * one_plus) * one_plus.dot(drive * ground);
    const Complex via_minus = two_dark.dot(drive * one_minus) * one_minus.dot(drive * ground);
    out.value = via_plus / w_plus + via_minus / w_minus;
    return out;
}

CorrelationSeries conditional_g2_tau(const SystemParams& params, Mode mode,
                                     const std::vector<double>& tau_grid) {
    if (mode == Mode::b) {
        throw std::invalid_argument("conditional_g2_tau: detection modes are a|s");
    }
    if (tau_grid.empty() || tau_grid.front() != 0.0) {
        throw std::invalid_argument("conditional_g2_tau: tau grid must start at 0");
    }
    const AmplitudeState ss = steady_amplitudes(params);
    const Complex kt(params.kappa, -params.delta);
    const double g = params.g;
    const double om = params.omega;
    const double rt2 = std::sqrt(2.0);

    // Post-jump amplitude vector and its generator. Detection of an a
    // photon leaves the original three lowest levels; detection of an s
    // photon leaves the one-phonon sector whose splitting is enhanced to
    // g/sqrt(2) and whose bottom amplitude decays at gamma/2.
    Eigen::Vector3cd y;
    Eigen::Matrix3cd gen = Eigen::Matrix3cd::Zero();
    double norm4;  // |steady one-photon amplitude|^4
    int track;     // component whose squared magnitude gives g2
    if (mode == Mode::a) {
        y << ss.a100, rt2 * ss.a200, ss.a111;
        gen(1, 0) = -kImag * om;
        gen(1, 1) = -kt;
        gen(1, 2) = -kImag * (g / 2);
        gen(2, 1) = -kImag * (g / 2);
        gen(2, 2) = -kt;
        const double n1 = std::norm(ss.a100);
        norm4 = n1 * n1;
        track = 1;
    } else {
        y << ss.a011, ss.a111, rt2 * ss.a022;
        gen(0, 0) = -params.gamma / 2;
        gen(1, 0) = -kImag * om;
        gen(1, 1) = -kt;
        gen(1, 2) = -kImag * g / rt2;
        gen(2, 1) = -kImag * g / rt2;
        gen(2, 2) = -kt;
        const double n1 = std::norm(ss.a011);
        norm4 = n1 * n1;
        track = 2;
    }

    CorrelationSeries series;
    series.tau_grid = tau_grid;
    series.mode_pair = mode == Mode::a ? "aa" : "ss";
    series.values.resize(tau_grid.size());
    for (size_t k = 0; k < tau_grid.size(); ++k) {
        if (k > 0) {
            const double dt = tau_grid[k] - tau_grid[k - 1];
            if (dt <= 0) {
                throw std::invalid_argument("conditional_g2_tau: grid must be increasing");
            }
            y = (dt * gen).exp() * y;
        }
        series.values[k] = std::norm(y(track)) / norm4;
    }
    series.g2_zero = series.values[0];
    series.bound_violations = classical_bounds(series);
    return series;
}

}  // namespace omsim
