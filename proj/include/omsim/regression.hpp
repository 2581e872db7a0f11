// regression.hpp - Two-time correlations g2(tau) via the quantum
// regression theorem, jump-conditioned states, classical-bound checks.

#pragma once

#include "omsim/steady.hpp"

#include <string>
#include <vector>

namespace omsim {

struct NoDetection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoundViolations {
    bool exceeds_g2_zero{false};           // g2(tau) > g2(0)
    bool exceeds_coherence_distance{false};  // |g2(tau)-1| > |g2(0)-1|
};

struct CorrelationSeries {
    std::vector<double> tau_grid;  // units 1/kappa, strictly increasing from 0
    std::vector<double> values;
    std::string mode_pair;  // first-detected then second-detected, e.g. "as"
    double g2_zero{0};
    std::vector<BoundViolations> bound_violations;
};

struct ConditionalState {
    DensityMatrix rho_c;
    Mode jump_mode{Mode::a};
    double norm{0};  // tr(c rho c^dag) = <c^dag c>, the detection weight
};

// rho -> c rho c^dag / tr(.) after detecting a photon in the given mode.
ConditionalState conditional_state(const DensityMatrix& rho_ss, Mode mode);
ConditionalState conditional_state(const DensityMatrix& rho_ss, const QOperator& jump_op,
                                   Mode label);

// g2(tau) = tr(c2^dag c2 e^{L tau}[c1 rho c1^dag]) / (<c1^dag c1><c2^dag c2>),
// the first-detected operator applied to the steady state (time ordered);
// swap the operators for the reverse ordering.
CorrelationSeries g2_tau(const Liouvillian& liou, const DensityMatrix& rho_ss,
                         const QOperator& first_detected, const QOperator& second_detected,
                         const std::vector<double>& tau_grid, std::string mode_pair,
                         double rel_tol = 1e-8);

// Pair labels "aa", "ss", "as", "sa", "RR" (R substitutes the
// reflected-field operator).
CorrelationSeries g2_tau_pair(const Liouvillian& liou, const DensityMatrix& rho_ss,
                              const std::string& pair, const std::vector<double>& tau_grid,
                              double rel_tol = 1e-8);

// Schwarz-inequality flags, tolerance 1e-9 on each comparison.
std::vector<BoundViolations> classical_bounds(const CorrelationSeries& series);

// Linear spacing 0.02/g up to 20/kappa, then logarithmic to tau_max
// (default 5/gamma). Resolves Rabi oscillations and the slow mechanical
// tail in one grid.
std::vector<double> default_tau_grid(const SystemParams& params, double tau_max = -1);

}  // namespace omsim
