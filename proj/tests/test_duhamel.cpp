#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "schro/duhamel.hpp"
#include "schro/free_kernel.hpp"
#include "schro/potential.hpp"

using namespace schro;
using namespace schro::duhamel;

TEST_CASE("grid validation rejects malformed layouts") {
    Grid g;
    CHECK_NOTHROW(g.validate());
    g.dim = 2;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = Grid{};
    g.n_time = 3;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = Grid{};
    g.n_space = 8;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = Grid{};
    g.y = 0.5; // radial grid keeps the source at the origin
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = Grid{};
    g.dim = 1;
    g.y = 9.0; // outside the half-width
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = Grid{};
    g.t_max = 0.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("base term stores the free kernel on the grid") {
    Grid g;
    g.dim = 1;
    g.t_max = 2.0;
    g.n_time = 8;
    g.x_max = 6.0;
    g.n_space = 48;
    g.y = 0.5;
    Term b = base_term(g);
    CHECK(b.n == 0);
    CHECK(b.v.size() == static_cast<std::size_t>(g.n_time) * (g.n_space + 1));
    for (int j : {1, 3, 8}) {
        for (int i : {0, 10, 24, 48}) {
            double s = g.s_node(j), x = g.x_node(i);
            double want = gaussian_kernel(s, (x - g.y) * (x - g.y), 1);
            CHECK(b.at(g, j, i) == doctest::Approx(want).epsilon(1e-13));
        }
    }
}

TEST_CASE("series terms for a constant attractive potential match (ct)^n/n! q") {
    const double c = 0.3;
    auto pot = Potential::constant(1, -c);
    Grid g;
    g.dim = 1;
    g.t_max = 1.0;
    g.n_time = 32;
    g.x_max = 5.0;
    g.n_space = 250;
    Term p0 = base_term(g);
    Term p1 = next_term(pot, g, p0);
    Term p2 = next_term(pot, g, p1);
    Term p3 = next_term(pot, g, p2);
    CHECK(p1.n == 1);
    CHECK(p3.n == 3);

    auto check = [&](const Term& pn, int n, int j, int i, double tol) {
        double s = g.s_node(j), x = g.x_node(i);
        double fact = n == 1 ? 1.0 : (n == 2 ? 2.0 : 6.0);
        double want = std::pow(c * s, n) / fact * gaussian_kernel(s, x * x, 1);
        CHECK(pn.at(g, j, i) == doctest::Approx(want).epsilon(tol));
    };
    for (int i : {125, 150}) { // x = 0 and x = 1
        check(p1, 1, 32, i, 1e-3);
        check(p2, 2, 32, i, 1e-3);
        check(p3, 3, 32, i, 1e-3);
    }
    check(p1, 1, 16, 125, 1e-3); // interior time node s = 1/4

    auto rep = Potential::constant(1, 0.3);
    CHECK_THROWS_AS(next_term(rep, g, p0), std::invalid_argument);
    auto wrongdim = Potential::constant(3, -0.3);
    CHECK_THROWS_AS(next_term(wrongdim, g, p0), std::invalid_argument);
}

TEST_CASE("series converges for a weak coupling and flags a strong one") {
    Grid g;
    g.dim = 3;
    g.t_max = 1.0;
    g.n_time = 16;
    g.x_max = 6.0;
    g.n_space = 80;

    auto weak = Potential::power_decay(Sign::negative, 1.0, 0.05, 3);
    SumResult res = sum(weak, g);
    CHECK_FALSE(res.diverged);
    CHECK(res.n_terms >= 1);
    CHECK(res.sup_ratio.back() < 1.0);
    Term p0 = base_term(g);
    for (int j : {4, 10, 16}) {
        for (int i : {0, 20, 60}) {
            double ratio = res.total.at(g, j, i) / p0.at(g, j, i);
            CHECK(ratio >= 1.0 - 1e-12); // every term is nonnegative
            CHECK(ratio <= 1.2);         // true factor is at most e^(0.05 t)
        }
    }

    auto strong = Potential::power_decay(Sign::negative, 1.0, 5.0, 3);
    SumResult bad = sum(strong, g);
    CHECK(bad.diverged);
}

TEST_CASE("radial gauss integral matches independent quadrature values") {
    // references computed with adaptive quadrature; the fixed composite rule
    // here is good to a few parts in 1e4
    CHECK(radial_gauss_integral(3.0, 3, 1.0, 2.0) ==
          doctest::Approx(0.21815948917638422).epsilon(1e-3));
    CHECK(radial_gauss_integral(3.0, 1, 0.5, 1.0) ==
          doctest::Approx(0.5286858594805209).epsilon(1e-3));
    CHECK(radial_gauss_integral(2.5, 2, 2.0, 0.0) ==
          doctest::Approx(0.5500512168945629).epsilon(1e-3));
    CHECK(radial_gauss_integral(4.0, 3, 0.25, 0.0) ==
          doctest::Approx(1.0258058359216466).epsilon(1e-3));
    // sharp Gaussians localize: integral -> (pi/kappa)^(d/2) * (1+R)^(-alpha)
    double sharp = radial_gauss_integral(3.0, 3, 400.0, 2.0);
    double local = std::pow(std::numbers::pi / 400.0, 1.5) / 27.0;
    CHECK(sharp == doctest::Approx(local).epsilon(0.05));
    CHECK_THROWS_AS(radial_gauss_integral(0.0, 3, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(radial_gauss_integral(3.0, 3, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(radial_gauss_integral(3.0, 3, 1.0, -1.0), std::domain_error);
}

TEST_CASE("scalar envelope identity holds with a bounded constant band") {
    std::vector<ScalarSample> samples;
    for (double r : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0})
        for (double s : {0.05, 0.2, 1.0, 5.0, 25.0, 120.0}) samples.push_back({s, r});

    FitResult d3 = check_equ1(3.0, 3, samples);
    CHECK(d3.ratios.size() == samples.size());
    CHECK(d3.c_min > 0.0);
    CHECK(d3.band == doctest::Approx(6.046).epsilon(0.02));
    CHECK(d3.band < 10.0);

    // alpha == dim turns on the logarithmic factor
    FitResult d2 = check_equ1(3.0, 2, samples);
    CHECK(d2.band < 10.0);

    CHECK_THROWS_AS(check_equ1(2.0, 3, samples), std::domain_error);
    CHECK_THROWS_AS(check_equ1(3.0, 4, samples), std::invalid_argument);
    CHECK_THROWS_AS(check_equ1(3.0, 3, std::vector<ScalarSample>{}), std::invalid_argument);
    std::vector<ScalarSample> badsm = {{0.0, 1.0}};
    CHECK_THROWS_AS(check_equ1(3.0, 3, badsm), std::domain_error);
}

TEST_CASE("convolution bound holds on axis configurations") {
    std::vector<ConvSample> samples;
    for (double t : {1.0, 1.5, 2.2, 3.3, 4.7, 6.0}) {
        samples.push_back({t, 0.0, 0.0});
        samples.push_back({t, 0.0, 1.0});
        samples.push_back({t, 1.0, 0.0});
        samples.push_back({t, 1.0, 1.0});
        samples.push_back({t, 0.0, -1.0});
    }
    FitResult fit = check_convolution_bound(3.0, 0.5, 1.0, samples);
    CHECK(fit.ratios.size() == samples.size());
    CHECK(fit.c_min > 0.0);
    CHECK(fit.band == doctest::Approx(6.956).epsilon(0.02));
    CHECK(fit.band < 10.0);

    CHECK_THROWS_AS(check_convolution_bound(2.0, 0.5, 1.0, samples), std::domain_error);
    CHECK_THROWS_AS(check_convolution_bound(3.0, 1.0, 0.5, samples), std::domain_error);
    CHECK_THROWS_AS(check_convolution_bound(3.0, 0.5, 1.0, std::vector<ConvSample>{}),
                    std::invalid_argument);
}
