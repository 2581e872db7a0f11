// krylov.hpp - Arnoldi approximation of the matrix exponential action
// y = exp(t A) v for large sparse A, with adaptive substepping.

#pragma once

#include "omsim/fock.hpp"

namespace omsim {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative local error per substep is held below rel_tol. Small systems
// (n <= krylov_dim + 2) fall back to a dense exponential.
Eigen::VectorXcd expm_multiply(const SparseMatrix& a, Eigen::VectorXcd v, double t,
                               double rel_tol = 1e-8, int krylov_dim = 30);

}  // namespace omsim
