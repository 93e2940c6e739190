#include "bsv/schmidt.hpp"

#include "bsv/errors.hpp"
#include "bsv/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bsv;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXcd random_complex(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(d(rng), d(rng));
    return m;
}

Setup single_crystal_setup(int n_points, int n_max) {
    Setup s = build_setup(parse_config_text(
        "gain = 0\n[pump]\nwavelength_nm = 354.7\nfwhm_um = 120.0\n"
        "[[segment]]\nkind = \"crystal\"\nlength_mm = 3.0\n"));
    s.grid.n_points = n_points;
    s.grid.n_max = n_max;
    return s;
}

/// Synthetic kernel sum_i sqrt(l_i) f_i(q) f_i(q') placed in harmonic n = 0.
TpaKernel synthetic_kernel(const RadialGrid& grid, const std::vector<double>& lambda,
                           double width_scale = 1.0) {
    const int nq = grid.n_points;
    TpaKernel k;
    k.grid = grid;
    k.n_max = grid.n_harmonics;
    k.harmonics.assign(2 * k.n_max + 1, Eigen::MatrixXcd::Zero(nq, nq));
    const double q0 = grid.q_max / 2.0;
    std::vector<Eigen::VectorXcd> f;
    for (size_t i = 0; i < lambda.size(); ++i) {
        Eigen::VectorXcd v(nq);
        const double w = grid.q_max / (8.0 * width_scale);
        for (int j = 0; j < nq; ++j) {
            const double x = (grid.nodes[j] - q0) / w;
            // Hermite-like ladder keeps the factors orthogonal
            double h = 1.0;
            if (i == 1) h = x;
            if (i == 2) h = x * x - 0.5;
            v(j) = h * std::exp(-0.5 * x * x);
        }
        // Gram-Schmidt in L2(dq), then normalize
        for (const auto& prev : f) {
            Complex ip(0.0, 0.0);
            for (int j = 0; j < nq; ++j)
                ip += grid.weights[j] * std::conj(prev(j)) * v(j);
            v -= ip * prev;
        }
        double nrm = 0.0;
        for (int j = 0; j < nq; ++j) nrm += grid.weights[j] * std::norm(v(j));
        v /= std::sqrt(nrm);
        f.push_back(v);
    }
    Eigen::MatrixXcd& chi = k.harmonic(0);
    for (size_t i = 0; i < lambda.size(); ++i)
        for (int a = 0; a < nq; ++a)
            for (int b = 0; b < nq; ++b)
                chi(a, b) += std::sqrt(lambda[i]) / kTwoPi * f[i](a) * f[i](b) /
                             std::sqrt(grid.nodes[a] * grid.nodes[b]);
    return k;
}

} // namespace

TEST_CASE("takagi factorizes random complex symmetric matrices") {
    for (unsigned seed : {1u, 2u, 3u}) {
        Eigen::MatrixXcd a = random_complex(24, seed);
        Eigen::MatrixXcd m = a + a.transpose();
        TakagiResult t = takagi(m);
        CHECK((t.u * t.s.asDiagonal() * t.u.transpose() - m).norm() / m.norm() < 1e-12);
        CHECK((t.u.adjoint() * t.u - Eigen::MatrixXcd::Identity(24, 24)).norm() < 1e-12);
        for (int i = 1; i < t.s.size(); ++i) CHECK(t.s(i) <= t.s(i - 1) + 1e-14);
    }
}

TEST_CASE("takagi handles degenerate singular values") {
    // unitary congruence of diag(2,2,2,1,0.5): a 3-fold degenerate block
    Eigen::MatrixXcd g = random_complex(5, 99);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd u0 = qr.householderQ();
    Eigen::VectorXd s0(5);
    s0 << 2.0, 2.0, 2.0, 1.0, 0.5;
    Eigen::MatrixXcd m = u0 * s0.asDiagonal() * u0.transpose();
    TakagiResult t = takagi(m);
    CHECK((t.u * t.s.asDiagonal() * t.u.transpose() - m).norm() / m.norm() < 1e-11);
    CHECK(t.s(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.s(2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t.s(4) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("takagi rejects asymmetric input") {
    Eigen::MatrixXcd m = random_complex(8, 5);
    CHECK_THROWS_AS(takagi(m), NumericalError);
}

TEST_CASE("rank-1 kernel gives a single unit-weight mode") {
    Quadrature q = gauss_legendre(96, 0.0, 1.0);
    RadialGrid grid{96, 1.0, q.nodes, q.weights, 4};
    TpaKernel k = synthetic_kernel(grid, {1.0});
    SchmidtModes modes = radial_schmidt(k);
    REQUIRE(modes.entries.size() == 1);
    CHECK(modes.entries[0].lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(modes.entries[0].n == 0);
    // profile matches the factor up to sign: compare |u| and orthonormality
    double nrm = 0.0;
    for (int j = 0; j < 96; ++j)
        nrm += grid.weights[j] * std::norm(modes.entries[0].u(j));
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-10));
    TpaKernel rec = reconstruct_tpa(modes, grid);
    CHECK(kernel_l2_distance(k, rec) < 1e-12);
}

TEST_CASE("two-mode kernel truncated to the top mode loses exactly the tail weight") {
    Quadrature q = gauss_legendre(128, 0.0, 1.0);
    RadialGrid grid{128, 1.0, q.nodes, q.weights, 2};
    TpaKernel k = synthetic_kernel(grid, {0.6, 0.4});
    SchmidtModes full = radial_schmidt(k);
    REQUIRE(full.entries.size() == 2);
    CHECK(full.entries[0].lambda == doctest::Approx(0.6).epsilon(1e-10));
    CHECK(full.entries[1].lambda == doctest::Approx(0.4).epsilon(1e-10));

    SchmidtModes top1 = radial_schmidt(k, /*lambda_min=*/0.5);
    REQUIRE(top1.entries.size() == 1);
    TpaKernel rec = reconstruct_tpa(top1, grid);
    const double dist = kernel_l2_distance(k, rec);
    CHECK(dist * dist == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("Mehler kernel: geometric eigenvalue ladder") {
    // K(x,y) = exp(-a(x^2+y^2) - 2bxy) has Schmidt weights (1-mu) mu^m
    const double a = 1.0, b = -0.3;
    const double beta = -b / a;
    const double w = (1.0 - std::sqrt(1.0 - beta * beta)) / beta;
    const double mu = w * w;

    const int n = 200;
    const double xmax = 9.0;
    Quadrature gl = gauss_legendre(n, -xmax, xmax);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = std::sqrt(gl.weights[i] * gl.weights[j]) *
                      std::exp(-a * (gl.nodes[i] * gl.nodes[i] + gl.nodes[j] * gl.nodes[j]) -
                               2.0 * b * gl.nodes[i] * gl.nodes[j]);
    TakagiResult t = takagi(m);
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) sum2 += t.s(i) * t.s(i);
    for (int k = 0; k < 10; ++k) {
        const double lam = t.s(k) * t.s(k) / sum2;
        const double expect = (1.0 - mu) * std::pow(mu, k);
        CHECK(std::abs(lam - expect) / expect < 1e-8);
    }
}

TEST_CASE("single-crystal kernel: weights sum to one and match a Hermitian eigensolve") {
    Setup s = single_crystal_setup(128, 12);
    RadialGrid grid = default_grid(s);
    TpaKernel k = sample_kernel(s, grid);
    SchmidtModes modes = radial_schmidt(k);

    double sum = 0.0;
    for (const auto& e : modes.entries) {
        CHECK(e.lambda >= 0.0);
        sum += e.lambda;
    }
    CHECK(sum + modes.truncation_loss == doctest::Approx(1.0).epsilon(1e-9));
    // descending order, largest is (0,0)
    for (size_t i = 1; i < modes.entries.size(); ++i)
        CHECK(modes.entries[i].lambda <= modes.entries[i - 1].lambda + 1e-15);
    CHECK(modes.entries[0].n == 0);
    CHECK(modes.entries[0].m == 0);

    // independent route: eigenvalues of M_0 M_0^dag are the n = 0 weights
    Eigen::VectorXd sw(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j)
        sw(j) = std::sqrt(grid.weights[j] * grid.nodes[j]);
    Eigen::MatrixXcd m0 = kTwoPi * sw.asDiagonal() * k.harmonic(0) * sw.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m0 * m0.adjoint());
    std::vector<double> ev(es.eigenvalues().data(),
                           es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.rbegin(), ev.rend());
    int idx = 0;
    for (const auto& e : modes.entries) {
        if (e.n != 0) continue;
        CHECK(e.lambda == doctest::Approx(ev[idx]).epsilon(1e-8));
        ++idx;
        if (idx == 6) break;
    }
}

TEST_CASE("orthonormality and +-n degeneracy on a physical kernel") {
    Setup s = single_crystal_setup(128, 10);
    RadialGrid grid = default_grid(s);
    SchmidtModes modes = radial_schmidt(sample_kernel(s, grid));

    for (int n = 0; n <= 3; ++n) {
        std::vector<const SchmidtMode*> group;
        for (const auto& e : modes.entries)
            if (e.n == n) group.push_back(&e);
        for (size_t a = 0; a < group.size(); ++a)
            for (size_t b = 0; b <= a; ++b) {
                Complex ip(0.0, 0.0);
                for (int j = 0; j < grid.n_points; ++j)
                    ip += grid.weights[j] * group[a]->u(j) * std::conj(group[b]->u(j));
                CHECK(std::abs(ip - (a == b ? 1.0 : 0.0)) < 1e-8);
            }
    }
    for (const auto& e : modes.entries) {
        if (e.n <= 0) continue;
        const SchmidtMode* mirror = modes.find(e.m, -e.n);
        REQUIRE(mirror != nullptr);
        CHECK(std::abs(mirror->lambda - e.lambda) <= 1e-10);
        CHECK((mirror->u - e.u).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("round trip reconstructs the sampled kernel") {
    Setup s = single_crystal_setup(128, 12);
    RadialGrid grid = default_grid(s);
    TpaKernel k = sample_kernel(s, grid);
    SchmidtModes modes = radial_schmidt(k);
    TpaKernel rec = reconstruct_tpa(modes, grid);
    CHECK(kernel_l2_distance(k, rec) < 1e-6);
}

TEST_CASE("takagi symmetry: u-by-u reconstruction needs no independent right factors") {
    // per-harmonic check that M_n = sum_m s_m u_m u_m^T, i.e. u = v
    Setup s = single_crystal_setup(96, 6);
    RadialGrid grid = default_grid(s);
    TpaKernel k = sample_kernel(s, grid);
    Eigen::VectorXd sw(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j)
        sw(j) = std::sqrt(grid.weights[j] * grid.nodes[j]);
    for (int n = 0; n <= 2; ++n) {
        Eigen::MatrixXcd m = kTwoPi * sw.asDiagonal() * k.harmonic(n) * sw.asDiagonal();
        TakagiResult t = takagi(m);
        CHECK((t.u * t.s.asDiagonal() * t.u.transpose() - m).norm() / m.norm() < 1e-11);
    }
}

TEST_CASE("mode profiles follow the display phase convention") {
    Setup s = single_crystal_setup(96, 6);
    RadialGrid grid = default_grid(s);
    SchmidtModes modes = radial_schmidt(sample_kernel(s, grid));
    ModeProfile p = mode_profile(modes, 0, 0);
    int imax = 0;
    for (int j = 1; j < p.u.size(); ++j)
        if (std::abs(p.u(j)) > std::abs(p.u(imax))) imax = j;
    CHECK(std::abs(p.u(imax).imag()) < 1e-12);
    CHECK(p.u(imax).real() > 0.0);
    CHECK(imax > 0);
    CHECK(imax < p.u.size() - 1);  // bell-shaped: peak in the interior

    ModeProfile p2 = mode_profile(modes, 1, 2);
    ModeProfile p2m = mode_profile(modes, 1, -2);
    CHECK((p2.u - p2m.u).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(mode_profile(modes, 999, 0), NumericalError);
}

TEST_CASE("weights are stable under grid refinement") {
    Setup s1 = single_crystal_setup(256, 32);
    Setup s2 = single_crystal_setup(384, 32);
    SchmidtModes m1 = radial_schmidt(sample_kernel(s1, default_grid(s1)));
    SchmidtModes m2 = radial_schmidt(sample_kernel(s2, default_grid(s2)));
    const size_t k = std::min<size_t>(200, std::min(m1.entries.size(), m2.entries.size()));
    double worst = 0.0;
    for (size_t i = 0; i < k; ++i)
        worst = std::max(worst, std::abs(m1.entries[i].lambda - m2.entries[i].lambda));
    CHECK(worst < 1e-7);
}
