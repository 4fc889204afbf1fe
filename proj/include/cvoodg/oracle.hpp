#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cvoodg/coherent_bounds.hpp"
#include "cvoodg/cvcore.hpp"

namespace cvoodg::oracle {

enum class PairClass { phase_rotation, displacement, squeezing, loss };

std::string to_string(PairClass c);
// Throws std::invalid_argument for anything outside the four classes.
PairClass parse_pair_class(const std::string& name);

// Curve classes a pair is checked against.
std::vector<ClassTag> matching_curves(PairClass c);

enum class PairMode {
    // F^2(tau) = 1 - eps0^2/4: in-distribution distance is exactly eps0
    saturating,
    // F^2(tau) = 1 - eps0/2: the pair on which the coherent curves are tight.
    // Its in-distribution distance sqrt(2 eps0) exceeds eps0.
    formula_witness,
};

struct ChannelPairSample {
    PairClass pair_class = PairClass::phase_rotation;
    PairMode mode = PairMode::saturating;
    GaussianChannel target = GaussianChannel::identity();
    GaussianChannel learned = GaussianChannel::identity();
    double gap = 0.0;  // d-theta, |d|, squeezing parameter or 1 - sqrt(eta)
    double achieved_eps0 = 0.0;
    InDistributionGuarantee guarantee;
};

ChannelPairSample worst_case_pair(PairClass c, const InDistributionGuarantee& g,
                                  PairMode mode = PairMode::saturating);
// Same class with the gap scaled by `fraction` in [0, 1] and a common
// rotation `offset` applied before both channels.
ChannelPairSample scaled_pair(const ChannelPairSample& worst, double fraction, double offset);

double exact_coherent_distance(const ChannelPairSample& pair, double r, double phi);

// max over r on [0, tau] (17 points) and 8 phases
double in_distribution_distance(const ChannelPairSample& pair);

struct Assertion {
    std::string name;
    std::string status;  // pass | fail | exception
    // max over the grid of (actual - allowed); positive means a violation
    double max_slack = -2.0;
    std::map<std::string, double> worst_point;
    std::string detail;
    bool ok() const { return status != "fail"; }
};

struct VerificationReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<Assertion> assertions;
    bool passed() const;
};

constexpr double kViolationTol = 1e-9;

std::vector<double> default_r_grid();    // r with r^2 log-spaced on [1e-3, 100], 60 points
std::vector<double> default_phi_grid();  // 8 points on [0, 2 pi)

Assertion dominance_suite(const BoundCurve& curve, const ChannelPairSample& pair, const std::vector<double>& r_grid,
                          const std::vector<double>& phi_grid, const std::string& name = "dominance");

// Largest |distance - curve| over the grid, for equality witnesses.
double witness_gap(const BoundCurve& curve, const ChannelPairSample& pair, const std::vector<double>& r_grid);

struct MuNu {
    double mu_num = 0.0;
    double nu_num = 0.0;
    double mu_bound = 0.0;
    double nu_bound = 0.0;
    bool dominated() const { return mu_num <= mu_bound * (1.0 + 1e-12) && nu_num <= nu_bound * (1.0 + 1e-12); }
};
// Radial quadrature of |P_s| r and |P_s| r^3 for |m><n| (symmetrised off the
// diagonal), against the closed-form bounds. Throws quad::QuadratureError.
MuNu mu_nu_numeric(int m, int n, double s);

// pi int P_s[l1] Q[l2] d^2 alpha by radial quadrature with the angular part
// done analytically. Throws quad::QuadratureError.
double gamma_quadrature(const OffDiagLabel& l1, const OffDiagLabel& l2, double s);

struct DeltaS {
    double distance = 0.0;
    double bound = 0.0;
    double trace_deficit = 0.0;
    bool tail_warning = false;
};
DeltaS delta_s_exact(int m, double s, int dim);

struct SuiteGrids {
    std::vector<double> nbar = linear_grid(0.0, 100.0, 201);
    std::vector<double> eps0 = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
    double tau = 1.0;
    double limit_tol = 0.1;
    double concavity_tol = 1e-10;
};
std::vector<Assertion> concavity_and_limit_suite(const std::function<BoundCurve(const InDistributionGuarantee&)>& make,
                                                 const std::string& label, const SuiteGrids& grids = {});

// ||e^{-i dtheta n} rho e^{i dtheta n} - rho||
double phase_rotation_output_distance(const FockMatrix& rho, double dtheta);
// ||D(alpha) rho D(alpha)^dagger - rho|| with D evaluated on work_dim number
// states, enough to hold the displaced support.
double displacement_output_distance(const FockMatrix& rho, cplx alpha, int work_dim);

// Fock-basis SPAT truncated to dim and renormalised.
FockMatrix spat_fock(double q, int dim);

// Splitmix-style generator, portable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    double uniform();  // [0, 1)
private:
    std::uint64_t state_;
};

}  // namespace cvoodg::oracle
