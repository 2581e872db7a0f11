// steady.hpp - Steady-state solve L(rho) = 0 and equal-time observables.

#pragma once

#include "omsim/model.hpp"

#include <string>
#include <vector>

namespace omsim {

struct DegenerateSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFailure : std::runtime_error {
    SolverFailure(const std::string& msg, double residual_)
        : std::runtime_error(msg), residual(residual_) {}
    double residual;
};

struct SteadySolution {
    DensityMatrix rho;
    double residual{0};  // ||L vec(rho)|| / ||L||_F
};

// Trace-constrained sparse LU on the superoperator; inverse-iteration
// fallback if the direct solve does not reach tolerance. The undriven
// cold system (omega = 0, n_th = 0) short-circuits to the vacuum
// projector.
SteadySolution solve_steady(const Liouvillian& liou);
DensityMatrix steady_state(const Liouvillian& liou);

struct SteadyObservables {
    double n_a{0};
    double n_s{0};
    double n_R{0};
    double g2_aa_0{0};
    double g2_ss_0{0};
    double g2_RR_0{0};
    double g2_tot_0{0};
    double trunc_tail{0};  // max top-rung population over the three modes
    std::vector<std::string> flags;

    bool has_flag(const std::string& f) const;
};

// Operator set reused across sweep points (space- and drive-dependent only).
struct ObservableOps {
    HilbertSpace space;
    QOperator num_a, num_s, num_R;
    QOperator pair_aa, pair_ss, pair_RR;  // c^dag c^dag c c
    QOperator tot_pairs;                  // n_tot (n_tot - 1)
    QOperator num_tot;

    ObservableOps(const SystemParams& params, const HilbertSpace& space);
};

SteadyObservables observables(const DensityMatrix& rho, const SystemParams& params);
SteadyObservables observables(const DensityMatrix& rho, const SystemParams& params,
                              const ObservableOps& ops);

struct SweepRow {
    double delta{0};
    SteadyObservables obs;
    double residual{0};
    std::string error;  // nonempty -> the point failed and obs is meaningless
};

// One steady solve per detuning; rows independent and deterministic.
// Per-point failures are flagged in the row, never abort the sweep.
std::vector<SweepRow> sweep(const SystemParams& params, const std::vector<double>& delta_grid);

}  // namespace omsim
