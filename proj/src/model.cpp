#include "omsim/model.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <string>

namespace omsim {

void SystemParams::validate() const {
    if (kappa <= 0) throw std::invalid_argument("kappa must be > 0");
    if (gamma < 0) throw std::invalid_argument("gamma must be >= 0");
    if (omega < 0) throw std::invalid_argument("omega must be >= 0");
    if (n_th < 0) throw std::invalid_argument("n_th must be >= 0");
    if (g < 0) throw std::invalid_argument("g must be >= 0");
    if (trunc_threshold <= 0) throw std::invalid_argument("trunc_threshold must be > 0");
    if (!allow_strong_drive && omega / kappa > 0.1) {
        throw std::invalid_argument(
            "weak-drive guard: omega/kappa = " + std::to_string(omega / kappa) +
            " > 0.1; the analytic model assumes omega << kappa "
            "(pass --allow-strong-drive to override)");
    }
    make_space(dims);  // dimension validity
}

std::array<int, 3> SystemParams::default_dims(double n_th) {
    if (n_th <= 0) return {4, 4, 4};
    return {4, 4, static_cast<int>(std::ceil(6.0 * n_th)) + 4};
}

QOperator hamiltonian(const SystemParams& params, const HilbertSpace& space) {
    params.validate();
    const QOperator ca = annihilation(space, Mode::a);
    const QOperator cs = annihilation(space, Mode::s);
    const QOperator b = annihilation(space, Mode::b);
    const QOperator exchange = ca.adjoint() * cs * b;  // photon a<-s while absorbing a phonon
    QOperator h = Complex(-params.delta) * (number_op(space, Mode::a) + number_op(space, Mode::s)) +
                  Complex(params.g / 2) * (exchange + exchange.adjoint()) +
                  Complex(params.omega) * (ca + ca.adjoint());
    h.mat.makeCompressed();
    return h;
}

Eigen::VectorXcd stack_columns(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unstack_columns(const Eigen::VectorXcd& v, int n) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

SparseMatrix lift_left(const SparseMatrix& op) {
    SparseMatrix id(op.rows(), op.cols());
    id.setIdentity();
    return SparseMatrix(Eigen::kroneckerProduct(id, op));
}

SparseMatrix lift_right(const SparseMatrix& op) {
    SparseMatrix id(op.rows(), op.cols());
    id.setIdentity();
    return SparseMatrix(Eigen::kroneckerProduct(SparseMatrix(op.transpose()), id));
}

SparseMatrix dissipator_superop(const SparseMatrix& op) {
    const SparseMatrix op_dag = op.adjoint();
    const SparseMatrix op_dag_op = op_dag * op;
    // vec(2 o rho o^dag) = 2 (conj(o) kron o) vec(rho)
    return SparseMatrix(2.0 * SparseMatrix(Eigen::kroneckerProduct(SparseMatrix(op.conjugate()), op)) -
                        lift_left(op_dag_op) - lift_right(op_dag_op));
}

Liouvillian liouvillian(const SystemParams& params, const HilbertSpace& space) {
    const QOperator h = hamiltonian(params, space);
    const QOperator ca = annihilation(space, Mode::a);
    const QOperator cs = annihilation(space, Mode::s);
    const QOperator b = annihilation(space, Mode::b);

    SparseMatrix sup = Complex(0, -1) * SparseMatrix(lift_left(h.mat) - lift_right(h.mat));
    sup += params.kappa * dissipator_superop(ca.mat);
    sup += params.kappa * dissipator_superop(cs.mat);
    if (params.gamma > 0) {
        sup += (params.gamma / 2) * (params.n_th + 1) * dissipator_superop(b.mat);
        if (params.n_th > 0) {
            sup += (params.gamma / 2) * params.n_th * dissipator_superop(b.adjoint().mat);
        }
    }
    sup.makeCompressed();
    return {space, params, std::move(sup)};
}

Liouvillian liouvillian(const SystemParams& params) {
    return liouvillian(params, make_space(params.dims));
}

QOperator reflected_operator(const SystemParams& params, const HilbertSpace& space) {
    if (params.kappa <= 0) throw std::invalid_argument("kappa must be > 0");
    return annihilation(space, Mode::a) +
           Complex(0, params.omega / params.kappa) * identity_op(space);
}

Eigen::MatrixXcd apply_liouvillian(const Liouvillian& liou, const Eigen::MatrixXcd& rho) {
    return unstack_columns(liou.superop * stack_columns(rho), liou.space.total_dim);
}

}  // namespace omsim
