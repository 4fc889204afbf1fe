#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cvoodg {

enum class ClassTag { step, lipschitz, gaussian, phase_rotation, squeezing, displacement, symmetric, cubic_phase, universal, custom };

std::string to_string(ClassTag tag);
// Accepts the names above, with '-' or '_'. Throws std::invalid_argument.
ClassTag parse_class_tag(const std::string& name);

struct InDistributionGuarantee {
    double eps0 = 0.1;
    double tau = 1.0;

    // eps0 in [0, 2], tau > 0; the closed lower end admits the eps0 -> 0 limit.
    void validate() const;
};

// eps(eps0, nbar) with nbar = r^2. Evaluation clamps to [0, 2].
class BoundCurve {
public:
    using Fn = std::function<double(double)>;

    BoundCurve(ClassTag tag, InDistributionGuarantee g, Fn eval, bool concavified);

    double operator()(double nbar) const;
    ClassTag tag() const { return tag_; }
    const InDistributionGuarantee& guarantee() const { return g_; }
    bool concavified() const { return concavified_; }

    // min(curve, step) pointwise; not concave in general.
    double combined(double nbar) const;

private:
    ClassTag tag_;
    InDistributionGuarantee g_;
    std::shared_ptr<const Fn> eval_;
    bool concavified_;
};

BoundCurve step_bound(const InDistributionGuarantee& g);
BoundCurve lipschitz_bound(const InDistributionGuarantee& g);
BoundCurve gaussian_bound(const InDistributionGuarantee& g);
BoundCurve phase_rotation_bound(const InDistributionGuarantee& g);
BoundCurve squeezing_bound(const InDistributionGuarantee& g);
BoundCurve displacement_bound(const InDistributionGuarantee& g);
BoundCurve symmetric_gaussian_bound(const InDistributionGuarantee& g);

// sech of the largest squeezing gap compatible with g, W0(e^{2 tau^2} tau^2 (2-eps0)) / (2 tau^2)
double squeezing_sech_min(const InDistributionGuarantee& g);

// F(Delta, x) = |int exp(i Delta q^3 - (q - 2x)^2 / 2) dq| / sqrt(2 pi)
double cubic_phase_fidelity(double delta, double x);

struct CubicPhaseFit {
    double delta_max = 0.0;
    bool monotone_in_x = true;
};
// Largest cubic-phase gap whose in-distribution distance stays within eps0.
// Throws std::runtime_error if the bisection cannot be bracketed.
CubicPhaseFit cubic_phase_fit(const InDistributionGuarantee& g);

struct GridSpec {
    double nbar_max = 100.0;
    int points = 201;
};

BoundCurve cubic_phase_bound(const InDistributionGuarantee& g, GridSpec grid = {});

struct UniversalPoint {
    double value = 2.0;      // clamped
    double unclamped = 0.0;  // objective at the optimum before the clamp
    double s = 0.0;
    double tail = 0.0;  // certified series tail, already included
    int K = 0;
};
UniversalPoint universal_coherent_point(const InDistributionGuarantee& g, double r, double s_lo = 1e-8,
                                        double s_hi = 0.499);
// Objective for a fixed s (no optimisation, no clamp).
double universal_coherent_objective(const InDistributionGuarantee& g, double r, double s);
double universal_coherent_bound(const InDistributionGuarantee& g, double r);
BoundCurve universal_curve(const InDistributionGuarantee& g, GridSpec grid = {});

enum class HullMode {
    // upper hull of the samples themselves
    samples,
    // upper hull of (x_i, f(x_{i+1})): a majorant between grid points for
    // non-decreasing inputs
    certified,
};

// Least concave majorant on a uniform n-bar grid over [0, grid_max], linear in
// between and extended by the last segment beyond, clamped at 2.
BoundCurve concave_hull(const BoundCurve& curve, double grid_max, int grid_points, HullMode mode = HullMode::samples);

// Upper hull vertices of (x, y) with x increasing.
std::vector<std::size_t> upper_hull_indices(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> linear_grid(double lo, double hi, int points);
std::vector<double> log_grid(double lo, double hi, int points);

BoundCurve make_curve(ClassTag tag, const InDistributionGuarantee& g, GridSpec grid = {});

}  // namespace cvoodg
