#include "omsim/steady.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace omsim {

namespace {

constexpr double kResidualFactor = 1e-10;  // residual <= factor * ||L||_F
constexpr double kDenominatorFloor = 1e-300;

DensityMatrix hermitized(const HilbertSpace& space, const Eigen::MatrixXcd& raw) {
    Eigen::MatrixXcd rho = 0.5 * (raw + raw.adjoint());
    const double tr = rho.trace().real();
    if (std::abs(tr) < 1e-12) {
        throw SolverFailure("steady-state candidate has vanishing trace", 1.0);
    }
    rho /= tr;
    return {space, std::move(rho)};
}

double residual_of(const Liouvillian& liou, const DensityMatrix& rho) {
    return (liou.superop * stack_columns(rho.mat)).norm();
}

// Replace the first row of the superoperator with the trace functional;
// the steady state is then the solution of a nonsingular linear system
// with right-hand side e_0.
SparseMatrix trace_constrained(const Liouvillian& liou) {
    const int n = liou.space.total_dim;
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(liou.superop.nonZeros() + n);
    for (int k = 0; k < liou.superop.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(liou.superop, k); it; ++it) {
            if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(0, i * n + i, 1.0);
    SparseMatrix a(n * n, n * n);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();
    return a;
}

DensityMatrix inverse_iteration(const Liouvillian& liou, double l_norm, double tol) {
    const int n = liou.space.total_dim;
    const int nn = n * n;
    SparseMatrix shifted = liou.superop;
    SparseMatrix id(nn, nn);
    id.setIdentity();
    shifted += Complex(1e-12 * l_norm / std::sqrt(static_cast<double>(nn))) * id;
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) {
        throw SolverFailure("inverse-iteration factorization failed", 1.0);
    }
    Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
    Eigen::VectorXcd x = stack_columns(eye) / std::sqrt(static_cast<double>(n));
    DensityMatrix best{liou.space, eye / static_cast<double>(n)};
    double best_res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
        x = lu.solve(x);
        x.normalize();
        DensityMatrix cand = hermitized(liou.space, unstack_columns(x, n));
        const double res = residual_of(liou, cand);
        if (res < best_res) {
            best_res = res;
            best = std::move(cand);
        }
        if (best_res <= tol) break;
    }
    if (best_res > tol) {
        throw SolverFailure("steady-state solver did not converge; residual " +
                                std::to_string(best_res / l_norm) + " (relative)",
                            best_res / l_norm);
    }
    return best;
}

}  // namespace

bool SteadyObservables::has_flag(const std::string& f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

SteadySolution solve_steady(const Liouvillian& liou) {
    const auto& p = liou.params;
    const int n = liou.space.total_dim;

    if (p.omega == 0 && p.n_th == 0) {
        // Undriven cold system: the vacuum projector, reported directly
        // (the null space is solver-hostile when gamma is also small).
        return {basis_projector(liou.space, 0, 0, 0), 0.0};
    }
    if (p.gamma == 0 && (p.omega == 0 || p.g == 0)) {
        // The mechanical mode is then both undamped and dynamically
        // disconnected, so every phonon distribution is stationary.
        throw DegenerateSteadyState(
            "steady state is not unique: mechanical mode has no damping and no "
            "dynamical path to the optical decay");
    }

    const double l_norm = liou.superop.norm();
    const double tol = kResidualFactor * l_norm;

    SparseMatrix a = trace_constrained(liou);
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw DegenerateSteadyState(
            "trace-constrained steady-state system is singular (null space dimension != 1)");
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
    rhs(0) = 1.0;
    Eigen::VectorXcd x = lu.solve(rhs);

    DensityMatrix rho = hermitized(liou.space, unstack_columns(x, n));
    double res = residual_of(liou, rho);
    if (res > tol) {
        rho = inverse_iteration(liou, l_norm, tol);
        res = residual_of(liou, rho);
    }

    const DensityCheck check = check_density(rho);
    if (!check.ok()) {
        throw SolverFailure("steady state violates density-matrix invariants: "
                            "herm dev " + std::to_string(check.herm_deviation) +
                            ", min eig " + std::to_string(check.min_eigenvalue),
                            res / l_norm);
    }
    return {std::move(rho), res / l_norm};
}

DensityMatrix steady_state(const Liouvillian& liou) { return solve_steady(liou).rho; }

ObservableOps::ObservableOps(const SystemParams& params, const HilbertSpace& space_) {
    space = space_;
    const QOperator ca = annihilation(space_, Mode::a);
    const QOperator cs = annihilation(space_, Mode::s);
    const QOperator cr = reflected_operator(params, space_);
    const QOperator cr_dag = cr.adjoint();
    num_a = number_op(space_, Mode::a);
    num_s = number_op(space_, Mode::s);
    num_R = cr_dag * cr;
    pair_aa = ca.adjoint() * ca.adjoint() * ca * ca;
    pair_ss = cs.adjoint() * cs.adjoint() * cs * cs;
    pair_RR = cr_dag * cr_dag * cr * cr;
    num_tot = num_a + num_s;
    tot_pairs = num_tot * num_tot - num_tot;
}

namespace {

double top_rung_population(const DensityMatrix& rho) {
    const auto& space = rho.space;
    double worst = 0;
    for (int k = 0; k < 3; ++k) {
        double pop = 0;
        for (int idx = 0; idx < space.total_dim; ++idx) {
            if (rho.space.levels_of(idx)[k] == space.dims[k] - 1) {
                pop += rho.mat(idx, idx).real();
            }
        }
        worst = std::max(worst, pop);
    }
    return worst;
}

double g2_ratio(double numerator, double den, const char* flag,
                std::vector<std::string>* flags) {
    if (den < kDenominatorFloor) {
        flags->push_back(flag);
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::max(numerator, 0.0) / den;
}

}  // namespace

SteadyObservables observables(const DensityMatrix& rho, const SystemParams& params,
                              const ObservableOps& ops) {
    if (!(rho.space == ops.space)) {
        throw std::invalid_argument("observables: state/operator space mismatch");
    }
    SteadyObservables out;
    out.n_a = std::max(expectation(ops.num_a, rho).real(), 0.0);
    out.n_s = std::max(expectation(ops.num_s, rho).real(), 0.0);
    out.n_R = std::max(expectation(ops.num_R, rho).real(), 0.0);
    out.g2_aa_0 = g2_ratio(expectation(ops.pair_aa, rho).real(), out.n_a * out.n_a,
                           "undefined_g2_aa", &out.flags);
    out.g2_ss_0 = g2_ratio(expectation(ops.pair_ss, rho).real(), out.n_s * out.n_s,
                           "undefined_g2_ss", &out.flags);
    out.g2_RR_0 = g2_ratio(expectation(ops.pair_RR, rho).real(), out.n_R * out.n_R,
                           "undefined_g2_RR", &out.flags);
    const double n_tot = expectation(ops.num_tot, rho).real();
    out.g2_tot_0 = g2_ratio(expectation(ops.tot_pairs, rho).real(), n_tot * n_tot,
                            "undefined_g2_tot", &out.flags);
    out.trunc_tail = top_rung_population(rho);
    if (out.trunc_tail > params.trunc_threshold) {
        out.flags.push_back("untrusted_truncation");
    }
    return out;
}

SteadyObservables observables(const DensityMatrix& rho, const SystemParams& params) {
    return observables(rho, params, ObservableOps(params, rho.space));
}

std::vector<SweepRow> sweep(const SystemParams& params, const std::vector<double>& delta_grid) {
    if (delta_grid.empty()) throw std::invalid_argument("sweep: empty detuning grid");
    params.validate();
    const HilbertSpace space = make_space(params.dims);
    const ObservableOps ops(params, space);
    std::vector<SweepRow> rows(delta_grid.size());

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(delta_grid.size()); ++i) {
        SweepRow& row = rows[i];
        row.delta = delta_grid[i];
        SystemParams point = params;
        point.delta = delta_grid[i];
        try {
            const SteadySolution sol = solve_steady(liouvillian(point, space));
            row.obs = observables(sol.rho, point, ops);
            row.residual = sol.residual;
        } catch (const std::exception& e) {
            row.error = e.what();
            row.obs = SteadyObservables{};
            row.obs.flags.push_back("solver_failure");
        }
    }
    return rows;
}

}  // namespace omsim
