// model.hpp - Physical system assembly: Hamiltonian, Lindblad dissipators,
// Liouvillian superoperator, reflected-field operator.
//
// All rates are expressed in units of kappa (kappa = 1 internally): the
// optical amplitude decay rate, so the optical energy decay rate is
// 2*kappa. Superoperators act on column-stacked density matrices,
// vec(rho)[col * n + row] = rho(row, col), so vec(A X B) =
// (B^T kron A) vec(X). Every module downstream uses this convention.

#pragma once

#include "omsim/fock.hpp"

namespace omsim {

struct SystemParams {
    double g{0};       // optomechanical three-wave coupling
    double kappa{1};   // optical amplitude decay rate (energy decay 2*kappa)
    double gamma{0};   // mechanical energy decay rate
    double delta{0};   // laser detuning from the antisymmetric mode
    double omega{0};   // coherent drive amplitude on mode a
    double n_th{0};    // thermal phonon occupation of the mechanical bath
    std::array<int, 3> dims{4, 4, 4};
    bool allow_strong_drive{false};
    double trunc_threshold{1e-8};  // top-rung population above this flags results untrusted

    // The analytic engine assumes omega << kappa; enforce omega/kappa <= 0.1
    // unless explicitly overridden.
    void validate() const;

    double n0() const { return (omega / kappa) * (omega / kappa); }

    // [4,4,4] cold; extra phonon headroom ~6*n_th when the bath is warm.
    static std::array<int, 3> default_dims(double n_th);
};

struct Liouvillian {
    HilbertSpace space;
    SystemParams params;
    SparseMatrix superop;  // total_dim^2 x total_dim^2
};

// H = -delta (n_a + n_s) + (g/2)(ca^dag cs b + b^dag cs^dag ca)
//     + omega (ca^dag + ca)
QOperator hamiltonian(const SystemParams& params, const HilbertSpace& space);

// d rho / dt = -i[H, rho] + kappa D[ca] + kappa D[cs]
//              + (gamma/2)(n_th + 1) D[b] + (gamma/2) n_th D[b^dag]
// with D[o] rho = 2 o rho o^dag - o^dag o rho - rho o^dag o.
Liouvillian liouvillian(const SystemParams& params, const HilbertSpace& space);
Liouvillian liouvillian(const SystemParams& params);

// c_R = ca + i (omega/kappa) * I  (symmetric two-sided cavity input-output)
QOperator reflected_operator(const SystemParams& params, const HilbertSpace& space);

// Column-stacking helpers (the one place the convention is implemented).
Eigen::VectorXcd stack_columns(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unstack_columns(const Eigen::VectorXcd& v, int n);

// Superoperator lifts under column stacking.
SparseMatrix lift_left(const SparseMatrix& op);    // rho -> op * rho
SparseMatrix lift_right(const SparseMatrix& op);   // rho -> rho * op
SparseMatrix dissipator_superop(const SparseMatrix& op);

// L applied to a dense matrix, via the sparse superoperator.
Eigen::MatrixXcd apply_liouvillian(const Liouvillian& liou, const Eigen::MatrixXcd& rho);

}  // namespace omsim
