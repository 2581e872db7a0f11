#include "omsim/fock.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace omsim {

namespace {

void require_same_space(const HilbertSpace& x, const HilbertSpace& y) {
    if (!(x == y)) {
        throw std::invalid_argument("operator space mismatch: [" +
                                    std::to_string(x.dims[0]) + "," + std::to_string(x.dims[1]) +
                                    "," + std::to_string(x.dims[2]) + "] vs [" +
                                    std::to_string(y.dims[0]) + "," + std::to_string(y.dims[1]) +
                                    "," + std::to_string(y.dims[2]) + "]");
    }
}

}  // namespace

HilbertSpace make_space(const std::array<int, 3>& dims) {
    for (int d : dims) {
        if (d < 2) {
            throw std::invalid_argument("invalid Fock dimension " + std::to_string(d) +
                                        " (every mode needs dim >= 2)");
        }
    }
    return {dims, dims[0] * dims[1] * dims[2]};
}

QOperator identity_op(const HilbertSpace& space) {
    SparseMatrix m(space.total_dim, space.total_dim);
    m.setIdentity();
    return {space, std::move(m)};
}

QOperator annihilation(const HilbertSpace& space, Mode mode) {
    const int k = static_cast<int>(mode);
    if (k < 0 || k > 2) throw std::invalid_argument("unknown mode label");
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(static_cast<size_t>(space.total_dim));
    for (int idx = 0; idx < space.total_dim; ++idx) {
        auto n = space.levels_of(idx);
        if (n[k] == 0) continue;
        auto m = n;
        m[k] -= 1;
        // <...n-1...| c |...n...> = sqrt(n); the top rung is silently dropped.
        trips.emplace_back(space.index_of(m[0], m[1], m[2]), idx,
                           std::sqrt(static_cast<double>(n[k])));
    }
    SparseMatrix out(space.total_dim, space.total_dim);
    out.setFromTriplets(trips.begin(), trips.end());
    return {space, std::move(out)};
}

QOperator creation(const HilbertSpace& space, Mode mode) {
    return annihilation(space, mode).adjoint();
}

QOperator number_op(const HilbertSpace& space, Mode mode) {
    // Defined as the ladder product so that n = a^dag a holds as an exact
    // sparse identity (sqrt(n)^2 is within one ulp of n, not equal to it).
    const QOperator a = annihilation(space, mode);
    return a.adjoint() * a;
}

QOperator operator+(const QOperator& lhs, const QOperator& rhs) {
    require_same_space(lhs.space, rhs.space);
    return {lhs.space, SparseMatrix(lhs.mat + rhs.mat)};
}

QOperator operator-(const QOperator& lhs, const QOperator& rhs) {
    require_same_space(lhs.space, rhs.space);
    return {lhs.space, SparseMatrix(lhs.mat - rhs.mat)};
}

QOperator operator*(const QOperator& lhs, const QOperator& rhs) {
    require_same_space(lhs.space, rhs.space);
    return {lhs.space, SparseMatrix(lhs.mat * rhs.mat)};
}

QOperator operator*(Complex scale, const QOperator& op) {
    return {op.space, SparseMatrix(scale * op.mat)};
}

Complex expectation(const QOperator& op, const DensityMatrix& rho) {
    require_same_space(op.space, rho.space);
    // tr(A rho) = sum_ij A_ij rho_ji over the sparse pattern of A.
    Complex out = 0;
    for (int k = 0; k < op.mat.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(op.mat, k); it; ++it) {
            out += it.value() * rho.mat(it.col(), it.row());
        }
    }
    return out;
}

DensityMatrix basis_projector(const HilbertSpace& space, int n_a, int n_s, int n_b) {
    if (n_a < 0 || n_a >= space.dims[0] || n_s < 0 || n_s >= space.dims[1] || n_b < 0 ||
        n_b >= space.dims[2]) {
        throw std::invalid_argument("basis_projector: level outside truncation");
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.total_dim, space.total_dim);
    const int idx = space.index_of(n_a, n_s, n_b);
    m(idx, idx) = 1.0;
    return {space, std::move(m)};
}

Eigen::MatrixXcd reduced_density(const DensityMatrix& rho, Mode mode) {
    const int k = static_cast<int>(mode);
    const auto& space = rho.space;
    const int d = space.dims[k];
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < space.total_dim; ++i) {
        auto ni = space.levels_of(i);
        for (int m = 0; m < d; ++m) {
            auto nj = ni;
            nj[k] = m;
            out(ni[k], m) += rho.mat(i, space.index_of(nj[0], nj[1], nj[2]));
        }
    }
    return out;
}

DensityCheck check_density(const DensityMatrix& rho) {
    DensityCheck c;
    c.herm_deviation = (rho.mat - rho.mat.adjoint()).cwiseAbs().maxCoeff();
    c.trace_deviation = std::abs(rho.mat.trace() - Complex(1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
        0.5 * (rho.mat + rho.mat.adjoint()), Eigen::EigenvaluesOnly);
    c.min_eigenvalue = eig.eigenvalues().minCoeff();
    return c;
}

}  // namespace omsim
