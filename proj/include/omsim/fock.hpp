// fock.hpp - Truncated three-mode Fock space and sparse operator algebra.
//
// Mode order is fixed as [a, s, b]: antisymmetric optical, symmetric
// optical, mechanical. The composite basis index of |n_a n_s n_b> is
// (n_a * dims[s] + n_s) * dims[b] + n_b (row-major, mode a slowest).

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <stdexcept>

namespace omsim {

using Complex = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

enum class Mode : int { a = 0, s = 1, b = 2 };

constexpr const char* mode_name(Mode m) {
    switch (m) {
        case Mode::a: return "a";
        case Mode::s: return "s";
        case Mode::b: return "b";
    }
    return "?";
}

struct HilbertSpace {
    std::array<int, 3> dims{};
    int total_dim{0};

    int dim(Mode m) const { return dims[static_cast<int>(m)]; }

    int index_of(int n_a, int n_s, int n_b) const {
        return (n_a * dims[1] + n_s) * dims[2] + n_b;
    }

    std::array<int, 3> levels_of(int index) const {
        const int n_b = index % dims[2];
        const int rest = index / dims[2];
        return {rest / dims[1], rest % dims[1], n_b};
    }

    bool operator==(const HilbertSpace&) const = default;
};

// Each dim must be >= 2 (room for at least one excitation per mode).
HilbertSpace make_space(const std::array<int, 3>& dims);

// Sparse operator on a composite space. Value type: immutable by
// convention after construction; arithmetic produces new operators.
struct QOperator {
    HilbertSpace space;
    SparseMatrix mat;

    QOperator adjoint() const { return {space, SparseMatrix(mat.adjoint())}; }
};

QOperator identity_op(const HilbertSpace& space);
QOperator annihilation(const HilbertSpace& space, Mode mode);
QOperator creation(const HilbertSpace& space, Mode mode);
QOperator number_op(const HilbertSpace& space, Mode mode);

QOperator operator+(const QOperator& lhs, const QOperator& rhs);
QOperator operator-(const QOperator& lhs, const QOperator& rhs);
QOperator operator*(const QOperator& lhs, const QOperator& rhs);
QOperator operator*(Complex scale, const QOperator& op);
inline QOperator operator*(const QOperator& op, Complex scale) { return scale * op; }

struct DensityMatrix {
    HilbertSpace space;
    Eigen::MatrixXcd mat;
};

// tr(op * rho); spaces must match.
Complex expectation(const QOperator& op, const DensityMatrix& rho);

// |n_a n_s n_b><n_a n_s n_b|
DensityMatrix basis_projector(const HilbertSpace& space, int n_a, int n_s, int n_b);

// Partial trace down to the given mode's reduced density matrix.
Eigen::MatrixXcd reduced_density(const DensityMatrix& rho, Mode mode);

// Hermiticity / trace / positivity diagnostics for a candidate state.
struct DensityCheck {
    double herm_deviation{0};   // max |rho - rho^dag|
    double trace_deviation{0};  // |tr(rho) - 1|
    double min_eigenvalue{0};

    bool ok(double herm_tol = 1e-10, double trace_tol = 1e-10,
            double positivity_floor = -1e-8) const {
        return herm_deviation <= herm_tol && trace_deviation <= trace_tol &&
               min_eigenvalue >= positivity_floor;
    }
};

DensityCheck check_density(const DensityMatrix& rho);

}  // namespace omsim
