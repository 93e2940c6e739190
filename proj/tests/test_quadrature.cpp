#include "bsv/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace bsv;

TEST_CASE("nodes are interior, increasing, with positive weights") {
    const Quadrature q = gauss_legendre(256, 0.0, 0.545);
    REQUIRE(q.nodes.size() == 256);
    CHECK(q.nodes.front() > 0.0);
    CHECK(q.nodes.back() < 0.545);
    for (size_t i = 1; i < q.nodes.size(); ++i) CHECK(q.nodes[i] > q.nodes[i - 1]);
    for (double w : q.weights) CHECK(w > 0.0);
}

TEST_CASE("constant integrates to the interval length") {
    const Quadrature q = gauss_legendre(64, 0.0, 2.75);
    double sum = 0.0;
    for (double w : q.weights) sum += w;
    CHECK(sum == doctest::Approx(2.75).epsilon(1e-14));
}

TEST_CASE("exact for polynomials up to degree 2n-1") {
    const int n = 12;
    const double b = 1.7;
    const Quadrature q = gauss_legendre(n, 0.0, b);
    for (int k = 0; k <= 2 * n - 1; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += q.weights[i] * std::pow(q.nodes[i], k);
        const double exact = std::pow(b, k + 1) / (k + 1);
        CHECK(std::abs(acc - exact) / exact < 1e-12);
    }
}

TEST_CASE("large rule still integrates high polynomials sharply") {
    const int n = 256;
    const Quadrature q = gauss_legendre(n, 0.0, 1.0);
    // x^401 on (0,1): within the exactness band of a 256-point rule
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += q.weights[i] * std::pow(q.nodes[i], 401);
    CHECK(std::abs(acc - 1.0 / 402.0) * 402.0 < 1e-12);
}
