#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "cvoodg/coherent_bounds.hpp"
#include "cvoodg/cvcore.hpp"

namespace cvoodg {

struct NegativityProfile {
    double negativity = 0.0;
    double nbar_plus = 0.0;
    double nbar_minus = 0.0;
    double mu_P = 1.0;
    double nu_P = 0.0;

    // Fills mu_P and nu_P; throws std::invalid_argument on a negative mean energy.
    static NegativityProfile from_parts(double negativity, double nbar_plus, double nbar_minus);
    double nbar() const { return (1.0 + negativity) * nbar_plus - negativity * nbar_minus; }
    void validate() const;
};

namespace state {
struct Classical { double nbar = 0.0; };
struct FiniteNegativity { NegativityProfile profile; };
struct SPAT { double q = 1.0; };
struct Fock { int m = 0; };
struct SqueezedVacuum { double lambda = 0.5; };
struct KnownFock { FockMatrix rho; };
struct EnergyOnly { double nbar = 0.0; };
}  // namespace state

using InputStateSpec = std::variant<state::Classical, state::FiniteNegativity, state::SPAT, state::Fock,
                                    state::SqueezedVacuum, state::KnownFock, state::EnergyOnly>;

struct ExtensionParams {
    std::optional<double> s;
    std::optional<int> M;
    std::optional<double> kappa;
};

// value = clamp(curve_term + delta_term + truncation_term) with the three
// terms stored in intermediates under those names, plus "unclamped".
struct BoundReport {
    double value = 2.0;
    ExtensionParams params;
    std::string branch;
    std::map<std::string, double> intermediates;
};

double recompute_value(const BoundReport& report);

BoundReport classical_bound(const BoundCurve& curve, double nbar);
BoundReport finite_negativity_bound(const BoundCurve& curve, const NegativityProfile& p);

// Profile of C_s applied to a SPAT with thermal mean q; s = 0 is the SPAT itself.
NegativityProfile spat_profile(double q, double s);
BoundReport spat_value(const BoundCurve& curve, double q, double s);
BoundReport spat_bound(const BoundCurve& curve, double q);

double fock_prefactor(int m, double s);
BoundReport fock_value(const BoundCurve& curve, int m, double s);
BoundReport fock_bound(const BoundCurve& curve, int m);

// mu_{s,m,n} in log form; symmetric in (m, n).
double log_mu_element(int m, int n, double s);
// nu/mu for one element, s(1-s)(2 + |m-n|)/(1-2s).
double nu_mu_ratio(int m, int n, double s);
double mu_ub_from_fock(const FockMatrix& rho, double s, int M);
double nu_ub_from_fock(const FockMatrix& rho, double s, int M);

BoundReport known_fock_value(const BoundCurve& curve, const FockMatrix& rho, double s, int M);
BoundReport known_fock_bound(const BoundCurve& curve, const FockMatrix& rho, int M_max = 60);

double squeezed_mu_ub(double lambda, double s, int M);
double squeezed_eta_exact(double lambda, int M);
double squeezed_eta_lower(double lambda, int M);
BoundReport squeezed_vacuum_bound(const BoundCurve& curve, double lambda);

BoundReport generic_energy_value(const BoundCurve& curve, double nbar, int M, double kappa);
BoundReport generic_energy_bound(const BoundCurve& curve, double nbar, int M_max = 60);

double mu_monotone_envelope(double mu_ub, double nu, const BoundCurve& curve);

BoundReport extend(const BoundCurve& curve, const InputStateSpec& state);

}  // namespace cvoodg
