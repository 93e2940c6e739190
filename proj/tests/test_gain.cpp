#include "bsv/gain.hpp"

#include "bsv/errors.hpp"
#include "bsv/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace bsv;

namespace {

SchmidtModes fake_modes(const std::vector<double>& lambda) {
    SchmidtModes m;
    Quadrature q = gauss_legendre(8, 0.0, 1.0);
    m.grid = {8, 1.0, q.nodes, q.weights, 0};
    for (size_t i = 0; i < lambda.size(); ++i) {
        SchmidtMode e;
        e.m = static_cast<int>(i);
        e.n = 0;
        e.lambda = lambda[i];
        e.u = Eigen::VectorXcd::Zero(8);
        e.partner = static_cast<int>(i);
        m.entries.push_back(e);
    }
    return m;
}

} // namespace

TEST_CASE("zero gain is the identity transformation") {
    GainState st = bogolyubov(fake_modes({0.6, 0.4}), 0.0);
    for (const GainMode& g : st.modes) {
        CHECK(g.sinh_r == 0.0);
        CHECK(g.cosh_r == 1.0);
        CHECK(g.mean_photons == 0.0);
    }
    CHECK(st.total_photons == 0.0);
    CHECK(st.lambda_tilde[0] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("single mode at G = 1 matches the scalar hyperbolics") {
    GainState st = bogolyubov(fake_modes({1.0}), 1.0);
    CHECK(st.modes[0].sinh_r == doctest::Approx(1.1752011936438014).epsilon(1e-12));
    CHECK(st.modes[0].mean_photons == doctest::Approx(1.3810978455418157).epsilon(1e-12));
}

TEST_CASE("hyperbolic identity holds for every mode") {
    GainState st = bogolyubov(fake_modes({0.5, 0.3, 0.15, 0.05}), 2.7);
    for (const GainMode& g : st.modes)
        CHECK(g.cosh_r * g.cosh_r - g.sinh_r * g.sinh_r ==
              doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("renormalized weights: low-gain limit and frozen G = 2 values") {
    const std::vector<double> lam = {0.6, 0.4};
    const auto low = renormalized_eigenvalues(lam, 1e-6);
    CHECK(low[0] == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(low[1] == doctest::Approx(0.4).epsilon(1e-9));

    const auto two = renormalized_eigenvalues(lam, 2.0);
    CHECK(two[0] == doctest::Approx(0.655267359389).epsilon(1e-10));
    CHECK(two[1] == doctest::Approx(0.344732640611).epsilon(1e-10));

    const auto equal = renormalized_eigenvalues({0.5, 0.5}, 3.7);
    CHECK(equal[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(equal[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("Schmidt number values and limits") {
    CHECK(schmidt_number({1.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(schmidt_number({0.6, 0.4}) == doctest::Approx(1.0 / 0.52).epsilon(1e-14));
    CHECK(schmidt_number(renormalized_eigenvalues({0.6, 0.4}, 2.0)) ==
          doctest::Approx(1.824098844).epsilon(1e-9));
    CHECK_THROWS_AS(schmidt_number({}), NumericalError);

    // K(G -> infinity) counts the top-weight multiplicity
    const auto big = renormalized_eigenvalues({0.4, 0.4, 0.2}, 60.0);
    CHECK(schmidt_number(big) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("gain scan: monotone K and single-mode flatness") {
    SchmidtModes single = fake_modes({1.0});
    auto rows = gain_scan(single, {0.1, 1.0, 5.0});
    for (const auto& r : rows) CHECK(r.schmidt_number == doctest::Approx(1.0));

    SchmidtModes multi = fake_modes({0.35, 0.25, 0.2, 0.12, 0.08});
    std::vector<double> gains;
    for (int i = 0; i < 30; ++i) gains.push_back(0.01 * std::pow(1000.0, i / 29.0));
    auto scan = gain_scan(multi, gains);
    for (size_t i = 1; i < scan.size(); ++i)
        CHECK(scan[i].schmidt_number <= scan[i - 1].schmidt_number + 1e-12);
    CHECK(scan.front().schmidt_number ==
          doctest::Approx(schmidt_number({0.35, 0.25, 0.2, 0.12, 0.08})).epsilon(1e-4));

    CHECK_THROWS_AS(gain_scan(multi, {}), ConfigError);
    CHECK_THROWS_AS(gain_scan(multi, {-1.0}), ConfigError);
}

TEST_CASE("low-gain Schmidt number equals the biphoton value") {
    SchmidtModes multi = fake_modes({0.5, 0.3, 0.2});
    const double k_biphoton = schmidt_number({0.5, 0.3, 0.2});
    auto rows = gain_scan(multi, {1e-6});
    CHECK(std::abs(rows[0].schmidt_number - k_biphoton) < 1e-6);
}
