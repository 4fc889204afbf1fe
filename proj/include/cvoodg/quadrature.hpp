#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cvoodg::quad {

template <class Real>
struct Result {
    Real value = 0;
    Real error = 0;
    Real l1 = 0;
    bool converged = true;
};

// Adaptive 15-point Gauss-Kronrod. The target is the largest of abs_tol,
// rel_tol times the integrand's L1 mass and the round-off floor of that mass.
template <class Real, class F>
Result<Real> integrate(F&& f, Real a, Real b, Real abs_tol, Real rel_tol = 0, unsigned max_depth = 24) {
    using GK = boost::math::quadrature::gauss_kronrod<Real, 15>;
    Result<Real> out;
    Real err0 = 0, l1 = 0;
    GK::integrate(f, a, b, 0, Real(0), &err0, &l1);
    const Real floor_tol = 64 * std::numeric_limits<Real>::epsilon() * l1;
    const Real target = std::max({abs_tol, floor_tol, rel_tol * l1});
    if (l1 == 0) {
        out.converged = true;
        return out;
    }
    Real err = 0;
    out.value = GK::integrate(f, a, b, max_depth, target / l1, &err, &out.l1);
    out.error = err;
    out.converged = err <= 4 * target;
    return out;
}

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved error " + std::to_string(achieved) + ")"), achieved_error(achieved) {}
    double achieved_error;
};

}  // namespace cvoodg::quad
