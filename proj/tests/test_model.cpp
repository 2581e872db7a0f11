#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "omsim/model.hpp"

#include <random>

using namespace omsim;

namespace {

SystemParams base_params() {
    SystemParams p;
    p.g = 20;
    p.gamma = 0.2;
    p.delta = 3.0;
    p.omega = 0.01;
    p.dims = {3, 3, 3};
    return p;
}

}  // namespace

TEST_CASE("parameter validation") {
    SystemParams p = base_params();
    CHECK_NOTHROW(p.validate());

    SystemParams strong = p;
    strong.omega = 0.5;
    CHECK_THROWS_AS(strong.validate(), std::invalid_argument);
    strong.allow_strong_drive = true;
    CHECK_NOTHROW(strong.validate());

    SystemParams bad = p;
    bad.kappa = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.gamma = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.dims = {1, 4, 4};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK(SystemParams::default_dims(0) == std::array<int, 3>{4, 4, 4});
    CHECK(SystemParams::default_dims(2) == std::array<int, 3>{4, 4, 16});
    CHECK(SystemParams::default_dims(0.5) == std::array<int, 3>{4, 4, 7});
}

TEST_CASE("hamiltonian matrix elements") {
    const HilbertSpace space = make_space({3, 3, 3});

    SystemParams diag = base_params();
    diag.g = 0;
    diag.omega = 0;
    diag.delta = 1;
    const QOperator h0 = hamiltonian(diag, space);
    CHECK(h0.mat.coeff(space.index_of(1, 0, 0), space.index_of(1, 0, 0)).real() ==
          doctest::Approx(-1.0).epsilon(1e-14));

    SystemParams p = base_params();
    const QOperator h = hamiltonian(p, space);
    // coupling term: <011|H|100> = g/2 for any detuning and drive
    CHECK(std::abs(h.mat.coeff(space.index_of(0, 1, 1), space.index_of(1, 0, 0)) -
                   Complex(p.g / 2)) < 1e-13);
    // ladder enhancement: <111|H|200> = g/sqrt(2)
    CHECK(std::abs(h.mat.coeff(space.index_of(1, 1, 1), space.index_of(2, 0, 0)) -
                   Complex(p.g / std::sqrt(2.0))) < 1e-13);
}

TEST_CASE("hamiltonian hermiticity over random parameters") {
    const HilbertSpace space = make_space({3, 4, 3});
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> uni(0, 1);
    for (int trial = 0; trial < 20; ++trial) {
        SystemParams p = base_params();
        p.g = 30 * uni(rng);
        p.delta = (2 * uni(rng) - 1) * 40;
        p.omega = 0.02 * uni(rng);
        const Eigen::MatrixXcd h(hamiltonian(p, space).mat);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("liouvillian annihilates the undriven vacuum") {
    SystemParams p = base_params();
    p.omega = 0;
    p.n_th = 0;
    const Liouvillian liou = liouvillian(p);
    const DensityMatrix vac = basis_projector(liou.space, 0, 0, 0);
    CHECK(apply_liouvillian(liou, vac.mat).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("decoupled linear cavity has a coherent steady state") {
    // g = 0, gamma = 0: the driven mode settles into the coherent state
    // with amplitude -i omega / (kappa - i delta).
    SystemParams p;
    p.g = 0;
    p.gamma = 0;
    p.delta = 0.7;
    p.omega = 0.01;
    p.dims = {6, 2, 2};
    const HilbertSpace space = make_space(p.dims);
    const Liouvillian liou = liouvillian(p, space);

    const Complex alpha = Complex(0, -p.omega) / Complex(p.kappa, -p.delta);
    CHECK(std::norm(alpha) == doctest::Approx(p.omega * p.omega /
                                              (p.kappa * p.kappa + p.delta * p.delta)));
    Eigen::VectorXcd coherent = Eigen::VectorXcd::Zero(space.dims[0]);
    double log_fact = 0;
    for (int n = 0; n < space.dims[0]; ++n) {
        if (n > 0) log_fact += std::log(static_cast<double>(n));
        coherent(n) = std::pow(alpha, n) * std::exp(-0.5 * std::norm(alpha) - 0.5 * log_fact);
    }
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(space.total_dim);
    for (int n = 0; n < space.dims[0]; ++n) full(space.index_of(n, 0, 0)) = coherent(n);
    const Eigen::MatrixXcd rho = full * full.adjoint();
    CHECK(apply_liouvillian(liou, rho).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("trace functional is a left null vector of the superoperator") {
    for (double n_th : {0.0, 1.5}) {
        SystemParams p = base_params();
        p.n_th = n_th;
        const Liouvillian liou = liouvillian(p);
        const int n = liou.space.total_dim;
        Eigen::VectorXcd col_sums = Eigen::VectorXcd::Zero(n * n);
        for (int k = 0; k < liou.superop.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(liou.superop, k); it; ++it) {
                if (it.row() % (n + 1) == 0) col_sums(it.col()) += it.value();
            }
        }
        CHECK(col_sums.cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("lindblad flow preserves hermiticity and trace") {
    SystemParams p = base_params();
    p.n_th = 0.3;
    const Liouvillian liou = liouvillian(p);
    const int n = liou.space.total_dim;
    std::mt19937 rng(5);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXcd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
        Eigen::MatrixXcd rho = 0.5 * (m + m.adjoint());
        rho /= rho.trace().real();
        const Eigen::MatrixXcd flow = apply_liouvillian(liou, rho);
        CHECK((flow - flow.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(std::abs(flow.trace()) <= 1e-10);
    }
}

TEST_CASE("reflected-field operator") {
    const HilbertSpace space = make_space({3, 3, 3});
    SystemParams p = base_params();

    SystemParams undriven = p;
    undriven.omega = 0;
    CHECK((reflected_operator(undriven, space).mat - annihilation(space, Mode::a).mat).norm() ==
          0.0);

    const QOperator cr = reflected_operator(p, space);
    const int vac = space.index_of(0, 0, 0);
    CHECK(std::abs(cr.mat.coeff(vac, vac) - Complex(0, p.omega / p.kappa)) < 1e-15);

    // vacuum reflection: n_R = (omega/kappa)^2, full reflection of the drive
    const DensityMatrix vacuum = basis_projector(space, 0, 0, 0);
    const Complex n_r = expectation(cr.adjoint() * cr, vacuum);
    CHECK(n_r.real() == doctest::Approx(p.n0()).epsilon(1e-12));
}

TEST_CASE("column stacking convention") {
    Eigen::MatrixXcd m(2, 2);
    m << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0);
    const Eigen::VectorXcd v = stack_columns(m);
    CHECK(v(0) == Complex(1, 0));  // (0,0)
    CHECK(v(1) == Complex(3, 0));  // (1,0): columns stacked
    CHECK(v(2) == Complex(2, 0));
    CHECK((unstack_columns(v, 2) - m).norm() == 0.0);

    // vec(A X B) = (B^T kron A) vec(X)
    const HilbertSpace space = make_space({2, 2, 2});
    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    auto random_dense = [&] {
        Eigen::MatrixXcd r(space.total_dim, space.total_dim);
        for (int i = 0; i < space.total_dim; ++i)
            for (int j = 0; j < space.total_dim; ++j) r(i, j) = Complex(gauss(rng), gauss(rng));
        return r;
    };
    const Eigen::MatrixXcd a = random_dense(), x = random_dense();
    const SparseMatrix a_sp = a.sparseView();
    CHECK((unstack_columns(lift_left(a_sp) * stack_columns(x), space.total_dim) - a * x)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((unstack_columns(lift_right(a_sp) * stack_columns(x), space.total_dim) - x * a)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}
