#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/lambert_w.hpp>

#include "cvoodg/coherent_bounds.hpp"

using namespace cvoodg;
using doctest::Approx;

namespace {

// Curve formulas written out directly with pow, as printed.
double pr_ref(double e, double t, double n) { return 2.0 * std::sqrt(1.0 - std::pow((2.0 - e) / 2.0, n / (t * t))); }
double gauss_ref(double e, double t, double n) {
    return 2.0 * std::sqrt(1.0 - std::pow((2.0 - e) / 2.0, 2.0 * n / (t * t) + std::sqrt(n) / t + 2.0));
}
double sym_ref(double e, double t, double n) {
    return 2.0 * std::sqrt(1.0 - std::pow((2.0 - e) / 2.0, 2.0 * (n / (t * t) + 1.0)));
}
double sq_ref(double e, double t, double n) {
    const double t2 = t * t;
    const double w = boost::math::lambert_w0(std::exp(2.0 * t2) * t2 * (2.0 - e));
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - w / (2.0 * t2) * std::exp(n * (w / t2 - 2.0))));
}

}  // namespace

TEST_CASE("class tags round-trip") {
    for (auto t : {ClassTag::step, ClassTag::lipschitz, ClassTag::gaussian, ClassTag::phase_rotation, ClassTag::squeezing,
                   ClassTag::displacement, ClassTag::symmetric, ClassTag::cubic_phase, ClassTag::universal})
        CHECK(parse_class_tag(to_string(t)) == t);
    CHECK(parse_class_tag("phase-rotation") == ClassTag::phase_rotation);
    CHECK_THROWS_AS(parse_class_tag("warp"), std::invalid_argument);
}

TEST_CASE("guarantee validation") {
    CHECK_NOTHROW(InDistributionGuarantee{0.0, 1.0}.validate());
    CHECK_THROWS_AS(InDistributionGuarantee({-0.1, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(InDistributionGuarantee({0.1, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(InDistributionGuarantee({2.5, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("closed-form curves against the printed expressions") {
    for (double e : {0.3, 0.1, 1e-3})
        for (double t : {0.5, 1.0, 2.0}) {
            const InDistributionGuarantee g{e, t};
            const auto pr = phase_rotation_bound(g), ga = gaussian_bound(g), sy = symmetric_gaussian_bound(g),
                       sq = squeezing_bound(g), di = displacement_bound(g);
            for (double n : {0.0, 0.3, 1.0, 4.0, 20.0, 100.0}) {
                CHECK(pr(n) == Approx(std::min(2.0, pr_ref(e, t, n))).epsilon(1e-10));
                CHECK(ga(n) == Approx(std::min(2.0, gauss_ref(e, t, n))).epsilon(1e-10));
                CHECK(sy(n) == Approx(std::min(2.0, sym_ref(e, t, n))).epsilon(1e-10));
                CHECK(sq(n) == Approx(std::min(2.0, sq_ref(e, t, n))).epsilon(1e-9));
                CHECK(di(n) == e);
            }
        }
}

TEST_CASE("step and lipschitz") {
    const InDistributionGuarantee g{0.2, 1.5};
    const auto st = step_bound(g);
    CHECK(st(2.25) == 0.2);
    CHECK(st(2.26) == 2.0);
    CHECK_FALSE(st.concavified());
    const auto lp = lipschitz_bound(g);
    CHECK(lp(1.0) == 0.2);
    // eps0 + 2 * (coherent-state distance between amplitudes 2 and 1.5)
    CHECK(lp(4.0) == Approx(std::min(2.0, 0.2 + 4.0 * std::sqrt(1.0 - std::exp(-0.25)))).epsilon(1e-12));
}

TEST_CASE("squeezing vanishes at eps0 = 0") {
    for (double t : {0.3, 1.0, 3.0}) {
        const auto sq = squeezing_bound({0.0, t});
        for (double n : {0.0, 1.0, 50.0}) CHECK(sq(n) == Approx(0.0).scale(1.0).epsilon(1e-7));
        CHECK(squeezing_sech_min({0.0, t}) == Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("BoundCurve clamps and combines") {
    const auto pr = phase_rotation_bound({0.3, 1.0});
    CHECK(pr(1e6) == 2.0);
    CHECK_THROWS_AS(pr(-1.0), std::domain_error);
    const auto ga = gaussian_bound({0.3, 1.0});
    // at n = 0 the gaussian curve is above the step value eps0
    CHECK(ga(0.0) > 0.3);
    CHECK(ga.combined(0.0) == 0.3);
}

TEST_CASE("cubic phase fidelity against direct quadrature") {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (double delta : {0.0, 0.01, 0.1})
        for (double x : {0.0, 0.5, 2.0}) {
            auto re = [&](double q) { return std::cos(delta * q * q * q) * std::exp(-0.5 * (q - 2 * x) * (q - 2 * x)); };
            auto im = [&](double q) { return std::sin(delta * q * q * q) * std::exp(-0.5 * (q - 2 * x) * (q - 2 * x)); };
            const double a = GK::integrate(re, 2 * x - 14, 2 * x + 14, 20, 1e-13);
            const double b = GK::integrate(im, 2 * x - 14, 2 * x + 14, 20, 1e-13);
            CHECK(cubic_phase_fidelity(delta, x) == Approx(std::hypot(a, b) / std::sqrt(2 * M_PI)).epsilon(1e-9));
        }
    CHECK(cubic_phase_fidelity(0.0, 3.0) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cubic phase fit saturates the in-distribution error") {
    const InDistributionGuarantee g{0.1, 1.0};
    const auto fit = cubic_phase_fit(g);
    CHECK(fit.delta_max > 0.0);
    double worst = 0.0;
    for (int i = 0; i <= 16; ++i) {
        const double f = cubic_phase_fidelity(fit.delta_max, i / 16.0);
        worst = std::max(worst, 2.0 * std::sqrt(std::max(0.0, 1.0 - f * f)));
    }
    CHECK(worst == Approx(0.1).epsilon(1e-6));
    const auto c = cubic_phase_bound(g, {20.0, 41});
    CHECK(c.concavified());
    CHECK(c(0.0) <= c(10.0));
}

TEST_CASE("universal bound basics") {
    const InDistributionGuarantee g{1e-4, 1.0};
    const auto p = universal_coherent_point(g, 0.0);
    CHECK(p.value < 2.0);
    CHECK(p.s > 0.0);
    CHECK(p.s < 0.5);
    CHECK(universal_coherent_objective(g, 0.5, p.s) >= universal_coherent_point(g, 0.5).unclamped - 1e-12);
    CHECK(universal_coherent_bound({1e-80, 1.0}, 2.0) < 0.1);
    CHECK(universal_coherent_bound(g, 10.0) == 2.0);
    CHECK_THROWS_AS(universal_coherent_objective(g, 1.0, 0.6), std::domain_error);
}

TEST_CASE("hull helpers") {
    const std::vector<double> x{0, 1, 2, 3, 4};
    const std::vector<double> y{0, 3, 1, 3.5, 0};
    const auto idx = upper_hull_indices(x, y);
    CHECK(idx == std::vector<std::size_t>{0, 1, 3, 4});
    const auto lg = log_grid(1e-3, 1e2, 6);
    CHECK(lg.front() == Approx(1e-3));
    CHECK(lg.back() == Approx(1e2));
    CHECK(lg[1] == Approx(1e-2));
    const auto st = concave_hull(step_bound({0.1, 1.0}), 10.0, 21, HullMode::certified);
    CHECK(st.concavified());
    for (double n = 0; n <= 12; n += 0.05) CHECK(st(n) >= step_bound({0.1, 1.0})(n) - 1e-15);
}
