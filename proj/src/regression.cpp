#include "omsim/regression.hpp"

#include "omsim/krylov.hpp"

#include <algorithm>
#include <cmath>

namespace omsim {

namespace {

constexpr double kDetectionFloor = 1e-300;
constexpr double kBoundTolerance = 1e-9;

}  // namespace

ConditionalState conditional_state(const DensityMatrix& rho_ss, const QOperator& jump_op,
                                   Mode label) {
    if (!(rho_ss.space == jump_op.space)) {
        throw std::invalid_argument("conditional_state: space mismatch");
    }
    Eigen::MatrixXcd jumped =
        jump_op.mat * rho_ss.mat * Eigen::MatrixXcd(jump_op.mat.adjoint());
    const double norm = jumped.trace().real();
    if (norm <= kDetectionFloor) {
        throw NoDetection("conditional_state: zero detection probability in mode " +
                          std::string(mode_name(label)));
    }
    jumped /= norm;
    jumped = 0.5 * (jumped + jumped.adjoint().eval());
    return {{rho_ss.space, std::move(jumped)}, label, norm};
}

ConditionalState conditional_state(const DensityMatrix& rho_ss, Mode mode) {
    if (mode == Mode::b) {
        throw std::invalid_argument("conditional_state: photodetection modes are a|s");
    }
    return conditional_state(rho_ss, annihilation(rho_ss.space, mode), mode);
}

CorrelationSeries g2_tau(const Liouvillian& liou, const DensityMatrix& rho_ss,
                         const QOperator& first_detected, const QOperator& second_detected,
                         const std::vector<double>& tau_grid, std::string mode_pair,
                         double rel_tol) {
    if (tau_grid.empty() || tau_grid.front() != 0.0) {
        throw std::invalid_argument("g2_tau: tau grid must start at 0");
    }
    for (size_t i = 1; i < tau_grid.size(); ++i) {
        if (tau_grid[i] <= tau_grid[i - 1]) {
            throw std::invalid_argument("g2_tau: tau grid must be strictly increasing");
        }
    }

    const int n = liou.space.total_dim;
    const SparseMatrix intensity2 =
        SparseMatrix(second_detected.mat.adjoint()) * second_detected.mat;
    const double den1 =
        (first_detected.mat * rho_ss.mat *
         Eigen::MatrixXcd(first_detected.mat.adjoint())).trace().real();
    const double den2 =
        expectation({liou.space, intensity2}, rho_ss).real();
    if (den1 <= kDetectionFloor || den2 <= kDetectionFloor) {
        throw NoDetection("g2_tau: vanishing mean intensity in pair " + mode_pair);
    }

    // Unnormalized conditional matrix, carried forward through the grid.
    Eigen::MatrixXcd cond =
        first_detected.mat * rho_ss.mat * Eigen::MatrixXcd(first_detected.mat.adjoint());
    Eigen::VectorXcd x = stack_columns(cond);

    CorrelationSeries series;
    series.tau_grid = tau_grid;
    series.mode_pair = std::move(mode_pair);
    series.values.resize(tau_grid.size());
    const double norm = den1 * den2;
    for (size_t k = 0; k < tau_grid.size(); ++k) {
        if (k > 0) {
            x = expm_multiply(liou.superop, std::move(x), tau_grid[k] - tau_grid[k - 1],
                              rel_tol);
        }
        Complex num = 0;  // tr(M X) = sum_ij M_ij X_ji with X column-stacked in x
        for (int col = 0; col < intensity2.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator it(intensity2, col); it; ++it) {
                num += it.value() * x(it.row() * n + it.col());
            }
        }
        series.values[k] = std::max(num.real(), 0.0) / norm;
    }
    series.g2_zero = series.values[0];
    series.bound_violations = classical_bounds(series);
    return series;
}

CorrelationSeries g2_tau_pair(const Liouvillian& liou, const DensityMatrix& rho_ss,
                              const std::string& pair, const std::vector<double>& tau_grid,
                              double rel_tol) {
    if (pair.size() != 2) throw std::invalid_argument("g2_tau_pair: pair must be two letters");
    auto op_of = [&](char c) -> QOperator {
        switch (c) {
            case 'a': return annihilation(liou.space, Mode::a);
            case 's': return annihilation(liou.space, Mode::s);
            case 'R': return reflected_operator(liou.params, liou.space);
            default: throw std::invalid_argument("g2_tau_pair: unknown channel in pair");
        }
    };
    return g2_tau(liou, rho_ss, op_of(pair[0]), op_of(pair[1]), tau_grid, pair, rel_tol);
}

std::vector<BoundViolations> classical_bounds(const CorrelationSeries& series) {
    std::vector<BoundViolations> out(series.values.size());
    const double g2_0 = series.g2_zero;
    const double dist_0 = std::abs(g2_0 - 1.0);
    for (size_t i = 0; i < series.values.size(); ++i) {
        out[i].exceeds_g2_zero = series.values[i] > g2_0 + kBoundTolerance;
        out[i].exceeds_coherence_distance =
            std::abs(series.values[i] - 1.0) > dist_0 + kBoundTolerance;
    }
    return out;
}

std::vector<double> default_tau_grid(const SystemParams& params, double tau_max) {
    const double kappa = params.kappa;
    if (tau_max <= 0) {
        tau_max = params.gamma > 0 ? 5.0 / params.gamma : 20.0 / kappa;
    }
    const double dt = 0.02 / (params.g > 0 ? params.g : kappa);
    const double linear_end = std::min(20.0 / kappa, tau_max);
    std::vector<double> grid;
    grid.reserve(static_cast<size_t>(linear_end / dt) + 300);
    for (double tau = 0; tau < linear_end + dt / 2; tau += dt) grid.push_back(tau);
    if (tau_max > grid.back() * 1.0000001) {
        const int n_log = 250;
        const double start = grid.back();
        for (int i = 1; i <= n_log; ++i) {
            grid.push_back(start * std::pow(tau_max / start, static_cast<double>(i) / n_log));
        }
    }
    return grid;
}

}  // namespace omsim
