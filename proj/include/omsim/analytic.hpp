// analytic.hpp - Closed-form weak-drive engine: pure-state amplitude
// models for steady-state occupations, equal-time correlations (zero and
// finite temperature), the two-photon drive rate, and conditional
// amplitude evolution for analytic g2(tau). Serves as the independent
// oracle cross-validating the full master-equation numerics.

#pragma once

#include "omsim/regression.hpp"

#include <optional>

namespace omsim {

struct CutoffError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// alpha = omega/kappa_tilde, x = g/(4 kappa_tilde), kappa_tilde = kappa - i delta
struct AnalyticContext {
    Complex alpha;
    Complex x;
    Complex kappa_tilde;
};

AnalyticContext analytic_context(const SystemParams& params);

// R_K(w) = [K^2 + (delta - w)^2][K^2 + (delta + w)^2]; even in w,
// positive for K != 0. Encodes resonance/antiresonance positions.
double r_factor(double big_k, double delta, double w);

// Amplitudes of the weak-drive pure-state ansatz. The last three slots
// belong to the conditional extension reached by detection of an s
// photon. time is empty for a steady state.
struct AmplitudeState {
    Complex a000{0}, a100{0}, a011{0}, a200{0}, a111{0}, a022{0};
    Complex a001{0}, a101{0}, a012{0};
    std::optional<double> time{};
};

// Steady-state amplitudes to leading order in the drive, gamma -> 0.
AmplitudeState steady_amplitudes(const SystemParams& params);

// Fixed-point residuals of the six amplitude equations (gamma = 0);
// all entries vanish at the steady amplitudes.
std::array<Complex, 6> amplitude_equation_residual(const SystemParams& params,
                                                   const AmplitudeState& amps);

// Steady amplitudes within the phonon-number-n subspace (couplings
// enhanced by sqrt(n+1)); n = 0 reproduces the zero-temperature set.
struct SubspaceAmplitudes {
    Complex a_10n, a_01n1, a_20n, a_11n1, a_02n2;
};

SubspaceAmplitudes subspace_amplitudes(const SystemParams& params, int n_phonons);

// Exact amplitude-ratio observables (primary analytic reference).
SteadyObservables closed_form_observables(const SystemParams& params);

// R-factor forms, valid for kappa/g << 1 (secondary, kept for the
// resonance-position reading they make explicit).
SteadyObservables leading_order_observables(const SystemParams& params);

// Thermal weight zeta_n = n_th^n / (1 + n_th)^(n+1).
double thermal_weight(double n_th, int n);

// Smallest cutoff with sum_n zeta_n >= 1 - coverage_eps.
int thermal_cutoff(double n_th, double coverage_eps = 1e-8);

// Thermal averages over uncoupled phonon subspaces; n_th = 0 reduces
// bitwise to closed_form_observables. trunc_tail reports the neglected
// thermal weight.
SteadyObservables thermal_observables(const SystemParams& params, int n_max);

struct TwoPhotonRabi {
    Complex value{0};
    bool divergent{false};  // an intermediate one-photon state is on resonance
};

// Second-order drive rate |0> -> |2_0> through the one-photon doublet;
// vanishes identically at delta = 0 by destructive interference.
TwoPhotonRabi two_photon_rabi(const SystemParams& params);

// Analytic g2(tau) from conditional amplitude evolution after a photon
// detection in mode a or s. gamma enters only through the slow decay of
// the heralded-phonon amplitude.
CorrelationSeries conditional_g2_tau(const SystemParams& params, Mode mode,
                                     const std::vector<double>& tau_grid);

}  // namespace omsim
