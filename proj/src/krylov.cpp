#include "omsim/krylov.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace omsim {

namespace {

double inf_norm(const SparseMatrix& a) {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            row_sums(it.row()) += std::abs(it.value());
        }
    }
    return row_sums.size() ? row_sums.maxCoeff() : 0.0;
}

}  // namespace

namespace {

// Krylov dimension sized to the step: the residual of an m-term Arnoldi
// approximation decays like (||A|| tau)^m / m! once m exceeds ||A|| tau.
int choose_dim(double a_tau, double tol, int cap) {
    double term = 1.0;
    for (int m = 1; m <= cap; ++m) {
        term *= a_tau / m;
        if (m >= 3 && term <= 0.01 * tol) return std::min(cap, m + 2);
    }
    return cap;
}

}  // namespace

Eigen::VectorXcd expm_multiply(const SparseMatrix& a, Eigen::VectorXcd v, double t,
                               double rel_tol, int krylov_dim) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || v.size() != n) {
        throw std::invalid_argument("expm_multiply: dimension mismatch");
    }
    if (t == 0.0 || v.norm() == 0.0) return v;

    const int m_cap = std::min<Eigen::Index>(krylov_dim, n - 1);
    if (n <= m_cap + 2) {
        Eigen::MatrixXcd dense = Eigen::MatrixXcd(a) * t;
        return dense.exp() * v;
    }

    const double anorm = inf_norm(a);
    if (anorm == 0.0) return v;
    const double tol = std::max(rel_tol, 1e-15);

    // Initial step heuristic from the classic Krylov propagator analysis.
    const double fact =
        std::pow((m_cap + 1) / std::exp(1.0), m_cap + 1) * std::sqrt(2.0 * M_PI * (m_cap + 1));
    double tau = std::min(
        t, (1.0 / anorm) * std::pow(fact * tol / (4.0 * v.norm() * anorm), 1.0 / m_cap));
    if (!(tau > 0)) tau = t;

    Eigen::MatrixXcd basis(n, m_cap + 1);
    Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(m_cap + 2, m_cap + 2);

    double t_done = 0.0;
    int steps = 0;
    while (t_done < t) {
        if (++steps > 100000) {
            throw IntegrationError("expm_multiply: step limit exceeded after t = " +
                                   std::to_string(t_done) + " of " + std::to_string(t));
        }
        tau = std::min(tau, t - t_done);
        const int m = std::max(4, choose_dim(anorm * tau, tol, m_cap));

        const double beta = v.norm();
        if (beta == 0.0) return v;

        hess.setZero();
        basis.col(0) = v / beta;
        int k_eff = m;
        bool happy = false;
        double avnorm = 0.0;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXcd w = a * basis.col(j);
            // Modified Gram-Schmidt with one refinement sweep.
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const Complex h = basis.col(i).dot(w);
                    w -= h * basis.col(i);
                    hess(i, j) += h;
                }
            }
            const double h_next = w.norm();
            hess(j + 1, j) = h_next;
            if (h_next < 1e-12 * anorm * tau || h_next < 1e-300) {
                k_eff = j + 1;
                happy = true;
                break;
            }
            basis.col(j + 1) = w / h_next;
        }
        if (!happy) avnorm = (a * basis.col(m)).norm();

        if (happy) {
            // Invariant subspace: the exponential is exact for any step.
            tau = t - t_done;
            Eigen::MatrixXcd f = (tau * hess.topLeftCorner(k_eff, k_eff)).exp();
            v = beta * basis.leftCols(k_eff) * f.col(0);
            t_done = t;
            break;
        }

        // phi-function augmentation for the error estimate
        hess(m + 1, m) = 1.0;
        int rejections = 0;
        while (true) {
            Eigen::MatrixXcd f = (tau * hess.topLeftCorner(m + 2, m + 2)).exp();
            const double err1 = std::abs(beta * f(m, 0));
            const double err2 = std::abs(beta * f(m + 1, 0)) * avnorm;
            double err_loc;
            double order;
            if (err1 > 10.0 * err2) {
                err_loc = err2;
                order = 1.0 / m;
            } else if (err1 > err2) {
                err_loc = err1 * err2 / (err1 - err2);
                order = 1.0 / m;
            } else {
                err_loc = err1;
                order = 1.0 / (m - 1);
            }
            const double err_budget = tol * beta * std::max(tau / t, 1e-3);
            if (err_loc <= err_budget || tau <= t * 1e-14) {
                v = beta * basis.leftCols(m) * f.col(0).head(m);
                t_done += tau;
                const double scale =
                    0.9 * std::pow(err_budget / std::max(err_loc, 1e-300), order);
                tau *= std::clamp(scale, 0.2, 5.0);
                break;
            }
            if (++rejections > 60) {
                throw IntegrationError(
                    "expm_multiply: cannot satisfy tolerance; local error " +
                    std::to_string(err_loc) + " at substep " + std::to_string(tau));
            }
            tau *= std::clamp(0.9 * std::pow(err_budget / err_loc, order), 0.1, 0.9);
        }
    }
    return v;
}

}  // namespace omsim
