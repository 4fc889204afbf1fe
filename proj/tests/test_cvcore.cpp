#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvoodg/cvcore.hpp"

using namespace cvoodg;
using doctest::Approx;

TEST_CASE("coherent moments and physicality") {
    const auto m = GaussianMoments::coherent(1.5, 0.4);
    CHECK(m.q(0) == Approx(3.0 * std::cos(0.4)));
    CHECK(m.q(1) == Approx(3.0 * std::sin(0.4)));
    CHECK(m.physical());
    GaussianMoments bad;
    bad.V = 0.5 * Eigen::Matrix2d::Identity();
    CHECK_FALSE(bad.physical());
}

TEST_CASE("channel validation") {
    CHECK_THROWS_AS(GaussianChannel(Eigen::Vector2d::Zero(), 2.0 * Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero()),
                    std::invalid_argument);
    CHECK_NOTHROW(GaussianChannel::loss(0.3));
    CHECK_NOTHROW(GaussianChannel::squeezing(0.7));
}

TEST_CASE("output fidelities against coherent-state overlaps") {
    const auto id = GaussianChannel::identity();
    for (double r : {0.0, 0.5, 2.0})
        for (double phi : {0.0, 1.1}) {
            // |<a|b>|^2 = exp(-|a - b|^2)
            CHECK(gaussian_output_fidelity_sq(id, GaussianChannel::displacement(0.6, 0.0), r, phi) ==
                  Approx(std::exp(-0.09)).epsilon(1e-13));
            CHECK(gaussian_output_fidelity_sq(id, GaussianChannel::phase_rotation(0.3), r, phi) ==
                  Approx(std::exp(-2.0 * r * r * (1.0 - std::cos(0.3)))).epsilon(1e-13));
            const double eta = 0.81;
            CHECK(gaussian_output_fidelity_sq(id, GaussianChannel::loss(eta), r, phi) ==
                  Approx(std::exp(-r * r * std::pow(1.0 - std::sqrt(eta), 2))).epsilon(1e-13));
        }
}

TEST_CASE("trace distance of pure coherent states") {
    const cplx a(0.7, 0.2), b(-0.1, 0.5);
    const auto ra = FockMatrix::coherent(a, 40), rb = FockMatrix::coherent(b, 40);
    CHECK(trace_distance(ra, rb) == Approx(2.0 * std::sqrt(1.0 - std::exp(-std::norm(a - b)))).epsilon(1e-10));
    CHECK(trace_distance(ra, ra) == Approx(0.0));
    CHECK_THROWS_AS(trace_distance(ra, FockMatrix::fock(0, 5)), std::invalid_argument);
    Eigen::MatrixXcd x(2, 2);
    x << 0, 1, 1, 0;
    CHECK(trace_norm(x) == Approx(2.0));
}

TEST_CASE("Fock matrices") {
    CHECK(FockMatrix::coherent(cplx(1.2, 0.0), 50).mean_photon_number() == Approx(1.44).epsilon(1e-10));
    CHECK(FockMatrix::squeezed_vacuum(0.5, 80).mean_photon_number() == Approx(0.25 / 0.75).epsilon(1e-10));
    CHECK(FockMatrix::fock(3, 6).mean_photon_number() == 3.0);
    Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(2, 2);
    nh(0, 0) = 1.0;
    nh(0, 1) = 0.3;
    CHECK_THROWS_AS(FockMatrix{nh}, std::invalid_argument);
    const auto [t, eta] = truncate_energy(FockMatrix::coherent(cplx(1.0, 0.0), 30), 2);
    CHECK(eta == Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(t.trace() == Approx(eta));
}

TEST_CASE("P_s of Fock projectors integrates to one") {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (double s : {0.05, 0.2, 0.4})
        for (int m = 0; m <= 5; ++m) {
            auto f = [&](double r) { return 2.0 * std::numbers::pi * r * p_rep_radial(m, m, s, r); };
            CHECK(GK::integrate(f, 0.0, 12.0, 15, 1e-13) == Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("C_s of the vacuum is thermal with mean s") {
    for (double s : {0.05, 0.3}) {
        const FockMatrix out = additive_noise_apply(FockMatrix::fock(0, 1), s, 30);
        for (int k = 0; k < 8; ++k)
            CHECK(out(k, k).real() == Approx(std::pow(s, k) / std::pow(1.0 + s, k + 1)).epsilon(1e-9));
        CHECK(std::abs(out(0, 1)) < 1e-12);
    }
}

TEST_CASE("C_s adds s to the mean photon number") {
    for (int m : {1, 2, 4}) {
        const FockMatrix out = additive_noise_apply(FockMatrix::fock(m, m + 1), 0.1, 50);
        CHECK(out.trace() == Approx(1.0).epsilon(1e-9));
        CHECK(out.mean_photon_number() == Approx(m + 0.1).epsilon(1e-8));
    }
    CHECK(delta_s_bound(2.0, 0.01) == Approx(2.0 * std::sqrt(0.05)));
}

TEST_CASE("gamma overlap is symmetric and matches Tr[C_s(A) B]") {
    const double s = 0.1;
    const OffDiagLabel a{2, 0, 0.0}, b{3, 1, 0.0};
    CHECK(gamma_overlap(a, b, s) == Approx(gamma_overlap(b, a, s)).epsilon(1e-12));
    // Tr[C_s(|2><0| sym) (|3><1| sym)] through the Fock-basis kernel
    const double k = 0.25 * (additive_noise_kernel(2, 0, 3, 1, s) + additive_noise_kernel(0, 2, 1, 3, s));
    CHECK(gamma_overlap(a, b, s) == Approx(k).epsilon(1e-8));
    CHECK(gamma_overlap({2, 0, 0.0}, {4, 0, 0.0}, s) == 0.0);
}
