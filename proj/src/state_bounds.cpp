#include "cvoodg/state_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cvoodg/optimize.hpp"
#include "cvoodg/specfun.hpp"

namespace cvoodg {

namespace {

constexpr double kSLo = 1e-12;
constexpr double kSHi = 0.49;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_concave(const BoundCurve& curve, const char* who) {
    if (!curve.concavified())
        throw std::invalid_argument(std::string(who) + ": curve must be concavified (apply concave_hull first)");
}

// mu * curve(arg) without inf * 0
double weighted(double log_mu, double c) {
    if (c <= 0.0) return 0.0;
    return std::exp(log_mu + std::log(c));
}

BoundReport finish(BoundReport r, double curve_term, double delta_term, double truncation_term) {
    r.intermediates["curve_term"] = curve_term;
    r.intermediates["delta_term"] = delta_term;
    r.intermediates["truncation_term"] = truncation_term;
    const double u = curve_term + delta_term + truncation_term;
    r.intermediates["unclamped"] = u;
    r.value = std::isnan(u) ? 2.0 : std::clamp(u, 0.0, 2.0);
    return r;
}

// e^{-t} - 1 + t
double em1pt(double t) {
    if (t > 0.5) return std::expm1(-t) + t;
    double term = t * t / 2.0;
    double sum = 0.0;
    for (int n = 2; n < 30 && term != 0.0; ++n) {
        sum += term;
        term *= -t / (n + 1);
    }
    return sum;
}

// t - 2 + (t + 2) e^{-t}, series coefficient (-1)^{n-1} (n-2)/n! for n >= 3
double spat_neg_kernel(double t) {
    if (t > 0.5) return t - 2.0 + (t + 2.0) * std::exp(-t);
    double fact = 6.0;
    double pw = t * t * t;
    double sum = 0.0;
    for (int n = 3; n < 30; ++n) {
        const double term = ((n % 2 == 1) ? 1.0 : -1.0) * (n - 2) * pw / fact;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        pw *= t;
        fact *= (n + 1);
    }
    return sum;
}

template <class F>
BoundReport best_over_s(F&& value_at, double lo, double hi) {
    const auto best = opt::golden_log([&](double s) { return value_at(s).intermediates.at("unclamped"); }, lo, hi);
    return value_at(best.x);
}

}  // namespace

double recompute_value(const BoundReport& r) {
    const auto& im = r.intermediates;
    const double u = im.at("curve_term") + im.at("delta_term") + im.at("truncation_term");
    return std::isnan(u) ? 2.0 : std::clamp(u, 0.0, 2.0);
}

NegativityProfile NegativityProfile::from_parts(double negativity, double nbar_plus, double nbar_minus) {
    NegativityProfile p;
    p.negativity = negativity;
    p.nbar_plus = nbar_plus;
    p.nbar_minus = nbar_minus;
    p.mu_P = 1.0 + 2.0 * negativity;
    p.nu_P = (1.0 + negativity) * nbar_plus + negativity * nbar_minus;
    p.validate();
    return p;
}

void NegativityProfile::validate() const {
    if (!(negativity >= 0.0) || !(nbar_plus >= 0.0) || !(nbar_minus >= 0.0))
        throw std::invalid_argument("NegativityProfile: negativity and energies must be non-negative");
    if (std::abs(mu_P - (1.0 + 2.0 * negativity)) > 1e-12 * mu_P)
        throw std::invalid_argument("NegativityProfile: mu_P != 1 + 2 N");
    const double nu = (1.0 + negativity) * nbar_plus + negativity * nbar_minus;
    if (std::abs(nu_P - nu) > 1e-12 * std::max(1.0, nu))
        throw std::invalid_argument("NegativityProfile: nu_P inconsistent with the energies");
    if (nbar() < -1e-12 * std::max(1.0, nu)) throw std::invalid_argument("NegativityProfile: negative mean energy");
}

BoundReport classical_bound(const BoundCurve& curve, double nbar) {
    require_concave(curve, "classical_bound");
    if (!(nbar >= 0.0)) throw std::invalid_argument("classical_bound: nbar must be non-negative");
    BoundReport r;
    r.branch = "classical";
    r.intermediates["nbar"] = nbar;
    return finish(r, curve(nbar), 0.0, 0.0);
}

BoundReport finite_negativity_bound(const BoundCurve& curve, const NegativityProfile& p) {
    require_concave(curve, "finite_negativity_bound");
    p.validate();
    const double split = (1.0 + p.negativity) * curve(p.nbar_plus) + p.negativity * curve(p.nbar_minus);
    const double arg = p.nu_P / p.mu_P;
    const double munu = p.mu_P * curve(arg);
    BoundReport r;
    r.intermediates["negativity"] = p.negativity;
    r.intermediates["mu"] = p.mu_P;
    r.intermediates["nu"] = p.nu_P;
    r.intermediates["curve_arg"] = arg;
    r.intermediates["split_form"] = split;
    r.intermediates["mu_nu_form"] = munu;
    if (split <= munu) {
        r.branch = "negativity_split";
        return finish(r, split, 0.0, 0.0);
    }
    r.branch = "mu_nu";
    return finish(r, munu, 0.0, 0.0);
}

NegativityProfile spat_profile(double q, double s) {
    if (!(q > 0.0)) throw std::invalid_argument("spat_profile: q must be positive");
    if (!(s >= 0.0 && s < 0.5)) throw std::invalid_argument("spat_profile: s must lie in [0, 1/2)");
    const double t = (1.0 - s) / (1.0 + q);
    const double Q = q + s;
    const double neg = (1.0 + q) * em1pt(t) / Q;
    const double negu = (1.0 + q) * spat_neg_kernel(t);
    const double mean = 1.0 + 2.0 * q + s;
    const double posu = mean + negu;
    NegativityProfile p;
    p.negativity = neg;
    p.nbar_minus = neg > 0.0 ? negu / neg : 0.0;
    p.nbar_plus = posu / (1.0 + neg);
    p.mu_P = 1.0 + 2.0 * neg;
    p.nu_P = posu + negu;
    return p;
}

BoundReport spat_value(const BoundCurve& curve, double q, double s) {
    require_concave(curve, "spat_bound");
    const NegativityProfile p = spat_profile(q, s);
    const double arg = p.nu_P / p.mu_P;
    BoundReport r;
    r.branch = s == 0.0 ? "spat_s0" : "spat";
    r.params.s = s;
    r.intermediates["mu_ub"] = p.mu_P;
    r.intermediates["nu"] = p.nu_P;
    r.intermediates["curve_arg"] = arg;
    r.intermediates["curve_value"] = curve(arg);
    return finish(r, p.mu_P * curve(arg), 4.0 * std::sqrt(s * (3.0 + 4.0 * q)), 0.0);
}

BoundReport spat_bound(const BoundCurve& curve, double q) {
    BoundReport at0 = spat_value(curve, q, 0.0);
    BoundReport opt = best_over_s([&](double s) { return spat_value(curve, q, s); }, kSLo, kSHi);
    return opt.intermediates.at("unclamped") < at0.intermediates.at("unclamped") ? opt : at0;
}

double fock_prefactor(int m, double s) {
    return std::exp(std::log(2.0) + (m + 1) * std::log1p(-s) - m * std::log(s) - std::log1p(-2.0 * s));
}

BoundReport fock_value(const BoundCurve& curve, int m, double s) {
    require_concave(curve, "fock_bound");
    if (m < 0) throw std::invalid_argument("fock_bound: m must be non-negative");
    if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("fock_bound: s must lie in (0, 1/2)");
    const double log_pref = std::log(2.0) + (m + 1) * std::log1p(-s) - m * std::log(s) - std::log1p(-2.0 * s);
    const double arg = 2.0 * s * (1.0 - s) / (1.0 - 2.0 * s);
    const double c = curve(arg);
    BoundReport r;
    r.branch = "fock";
    r.params.s = s;
    r.intermediates["mu_ub"] = std::exp(log_pref);
    r.intermediates["curve_arg"] = arg;
    r.intermediates["curve_value"] = c;
    return finish(r, weighted(log_pref, c), 4.0 * std::sqrt(s * (1.0 + 2.0 * m)), 0.0);
}

BoundReport fock_bound(const BoundCurve& curve, int m) {
    return best_over_s([&](double s) { return fock_value(curve, m, s); }, kSLo, kSHi);
}

double log_mu_element(int m, int n, double s) {
    const double l1s = std::log1p(-s);
    const double l12s = std::log1p(-2.0 * s);
    const double ls = std::log(s);
    if (m == n) return std::log(2.0) + (m + 1) * l1s - m * ls - l12s;
    const int d = std::abs(m - n);
    const int lo = std::min(m, n);
    const double half = 0.5 * d;
    return (2.0 + half) * std::log(2.0) + (1.0 + 0.5 * (m + n)) * l1s - std::log(std::numbers::pi) -
           0.5 * (m + n) * ls - (1.0 + half) * l12s + specfun::pochhammer_log(d + 1.0, lo).log_abs -
           0.5 * (specfun::log_factorial(m) + specfun::log_factorial(n)) + std::lgamma(1.0 + half);
}

double nu_mu_ratio(int m, int n, double s) { return s * (1.0 - s) / (1.0 - 2.0 * s) * (2.0 + std::abs(m - n)); }

namespace {

void check_mu_args(const FockMatrix& rho, double s, int M) {
    if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("mu_ub_from_fock: s must lie in (0, 1/2)");
    if (M < 1 || M > rho.dim()) throw std::invalid_argument("mu_ub_from_fock: need 1 <= M <= dim");
}

}  // namespace

namespace {

struct LogMuNu {
    double log_mu = -kInf;
    double log_nu = -kInf;
};

LogMuNu log_mu_nu_from_fock(const FockMatrix& rho, double s, int M) {
    check_mu_args(rho, s, M);
    LogMuNu out;
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < M; ++n) {
            const double a = std::abs(rho(m, n));
            if (a <= 0.0) continue;
            const double l = std::log(a) + log_mu_element(m, n, s);
            out.log_mu = specfun::log_add(out.log_mu, l);
            out.log_nu = specfun::log_add(out.log_nu, l + std::log(nu_mu_ratio(m, n, s)));
        }
    return out;
}

// ||rho - P rho P|| with P the projector on the first M number states. The
// cross blocks count here; the diagonal-only value would be 1 - eta_M.
double truncation_norm(const FockMatrix& rho, int M) {
    Eigen::MatrixXcd rest = rho.entries();
    rest.topLeftCorner(M, M).setZero();
    return trace_norm(rest);
}

BoundReport known_fock_value_impl(const BoundCurve& curve, const FockMatrix& rho, double s, int M, double trunc) {
    const LogMuNu l = log_mu_nu_from_fock(rho, s, M);
    double eta = 0.0, energy = 0.0;
    for (int m = 0; m < M; ++m) {
        eta += rho(m, m).real();
        energy += m * rho(m, m).real();
    }
    eta = std::clamp(eta, 0.0, 1.0);
    const double nbar_M = eta > 0.0 ? energy / eta : 0.0;
    const double arg = std::isfinite(l.log_mu) ? std::exp(l.log_nu - l.log_mu) : 0.0;
    const double c = curve(arg);
    BoundReport r;
    r.branch = "known_fock";
    r.params.s = s;
    r.params.M = M;
    r.intermediates["mu_ub"] = std::exp(l.log_mu);
    r.intermediates["nu_ub"] = std::exp(l.log_nu);
    r.intermediates["curve_arg"] = arg;
    r.intermediates["curve_arg_coarse"] = s * (1.0 - s) * (M + 1) / (1.0 - 2.0 * s);
    r.intermediates["curve_value"] = c;
    r.intermediates["eta_M"] = eta;
    r.intermediates["truncation_norm"] = trunc;
    r.intermediates["nbar_truncated"] = nbar_M;
    const double curve_term = std::isfinite(l.log_mu) ? weighted(l.log_mu, c) : 0.0;
    return finish(r, curve_term, eta * 4.0 * std::sqrt(s * (1.0 + 2.0 * nbar_M)), 2.0 * trunc);
}

}  // namespace

double mu_ub_from_fock(const FockMatrix& rho, double s, int M) { return std::exp(log_mu_nu_from_fock(rho, s, M).log_mu); }

double nu_ub_from_fock(const FockMatrix& rho, double s, int M) { return std::exp(log_mu_nu_from_fock(rho, s, M).log_nu); }

BoundReport known_fock_value(const BoundCurve& curve, const FockMatrix& rho, double s, int M) {
    require_concave(curve, "known_fock_bound");
    check_mu_args(rho, s, M);
    return known_fock_value_impl(curve, rho, s, M, truncation_norm(rho, M));
}

BoundReport known_fock_bound(const BoundCurve& curve, const FockMatrix& rho, int M_max) {
    require_concave(curve, "known_fock_bound");
    if (std::abs(rho.trace() - 1.0) > 1e-9) throw std::invalid_argument("known_fock_bound: rho must be normalised");
    const int top = std::min(rho.dim(), M_max);
    BoundReport best;
    double best_u = kInf;
    for (int M = 1; M <= top; ++M) {
        const double trunc = truncation_norm(rho, M);
        BoundReport r =
            best_over_s([&](double s) { return known_fock_value_impl(curve, rho, s, M, trunc); }, kSLo, kSHi);
        const double u = r.intermediates.at("unclamped");
        if (u < best_u) {
            best_u = u;
            best = std::move(r);
        }
    }
    return best;
}

namespace {

// (y^k - 1)/(y - 1) in log form, continuous through y = 1
double log_geometric(double y, int k) {
    if (std::abs(y - 1.0) < 1e-9) return std::log(k + 0.5 * k * (k - 1) * (y - 1.0));
    if (y > 1.0) {
        const double lk = k * std::log(y);
        return lk + std::log1p(-std::exp(-lk)) - std::log(y - 1.0);
    }
    return std::log(-std::expm1(k * std::log(y))) - std::log1p(-y);
}

double squeezed_weight(double lambda, int p) {
    // sqrt(1 - lambda^2) lambda^{2p} (2p)! / (4^p p!^2)
    return std::exp(0.5 * std::log1p(-lambda * lambda) + 2.0 * p * std::log(lambda) +
                    specfun::log_factorial(2 * p) - p * std::log(4.0) - 2.0 * specfun::log_factorial(p));
}

void check_squeezed(double lambda, int M) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("squeezed vacuum: lambda must lie in (0, 1)");
    if (M < 1 || M % 2 == 0) throw std::invalid_argument("squeezed vacuum: M must be a positive odd integer");
}

}  // namespace

double squeezed_mu_ub(double lambda, double s, int M) {
    check_squeezed(lambda, M);
    if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("squeezed_mu_ub: s must lie in (0, 1/2)");
    const int k = (M + 1) / 2;
    const double x = (1.0 - 2.0 * s) * (1.0 - s) * lambda / s;
    const double c = lambda * (1.0 - s) / (s * (1.0 - 2.0 * s));
    const double y1 = c * (1.0 + x);
    const double y2 = c * x;
    const double lt1 = std::log(4.0 / std::numbers::pi) - 0.5 * std::log1p(x) + log_geometric(y1, k);
    const double lt2 = log_geometric(y2, k);
    const double lpre = std::log(2.0) + std::log1p(-s) + 0.5 * std::log1p(-lambda * lambda) - std::log1p(-2.0 * s);
    return std::exp(lpre + specfun::log_add(lt1, lt2));
}

double squeezed_eta_exact(double lambda, int M) {
    check_squeezed(lambda, M);
    double eta = 0.0;
    for (int p = 0; 2 * p <= M - 1; ++p) eta += squeezed_weight(lambda, p);
    return std::min(eta, 1.0);
}

double squeezed_eta_lower(double lambda, int M) {
    check_squeezed(lambda, M);
    return 1.0 - lambda * lambda / (M * (1.0 - lambda * lambda));
}

BoundReport squeezed_vacuum_bound(const BoundCurve& curve, double lambda) {
    require_concave(curve, "squeezed_vacuum_bound");
    check_squeezed(lambda, 1);
    const double l2 = lambda * lambda;
    const double nbar = l2 / (1.0 - l2);
    const double threshold = lambda / (1.0 + lambda);

    BoundReport best;
    double best_u = kInf;
    const double s_classical = threshold * (1.0 + 1e-12);
    if (s_classical <= kSHi) {
        BoundReport r;
        r.branch = "squeezed_classical";
        r.params.s = s_classical;
        r.intermediates["curve_arg"] = nbar + s_classical;
        r.intermediates["curve_value"] = curve(nbar + s_classical);
        r = finish(r, curve(nbar + s_classical), 4.0 * std::sqrt(s_classical * (1.0 + l2) / (1.0 - l2)), 0.0);
        best_u = r.intermediates.at("unclamped");
        best = std::move(r);
    }

    const double s_hi = std::min(threshold, kSHi);
    for (int M = 1; M <= 59; M += 2) {
        const double eta = squeezed_eta_exact(lambda, M);
        double energy = 0.0;
        for (int p = 0; 2 * p <= M - 1; ++p) energy += 2.0 * p * squeezed_weight(lambda, p);
        const double nbar_M = eta > 0.0 ? energy / eta : 0.0;
        auto value_at = [&](double s) {
            const double mu = squeezed_mu_ub(lambda, s, M);
            const double arg = s * (1.0 - s) * (M + 1) / (1.0 - 2.0 * s);
            const double c = curve(arg);
            BoundReport r;
            r.branch = "squeezed_truncated";
            r.params.s = s;
            r.params.M = M;
            r.intermediates["mu_ub"] = mu;
            r.intermediates["curve_arg"] = arg;
            r.intermediates["curve_value"] = c;
            r.intermediates["eta_M"] = eta;
            r.intermediates["eta_M_lower"] = squeezed_eta_lower(lambda, M);
            r.intermediates["nbar_truncated"] = nbar_M;
            const double ct = c > 0.0 ? mu * c : 0.0;
            // pure state: ||psi - P psi P|| = sqrt((1 - eta)(1 + 3 eta))
            return finish(r, ct, eta * 4.0 * std::sqrt(s * (1.0 + 2.0 * nbar_M)),
                          2.0 * std::sqrt((1.0 - eta) * (1.0 + 3.0 * eta)));
        };
        BoundReport r = best_over_s(value_at, kSLo, s_hi);
        const double u = r.intermediates.at("unclamped");
        if (u < best_u) {
            best_u = u;
            best = std::move(r);
        }
    }
    return best;
}

BoundReport generic_energy_value(const BoundCurve& curve, double nbar, int M, double kappa) {
    require_concave(curve, "generic_energy_bound");
    if (!(nbar >= 0.0)) throw std::invalid_argument("generic_energy_bound: nbar must be non-negative");
    if (M < 1 || !(kappa > 1.0)) throw std::invalid_argument("generic_energy_bound: need M >= 1 and kappa > 1");
    const double s = 1.0 / (kappa * (M + 3));
    const double guard = M == 1 ? kInf : (1.0 - s) * (1.0 - 2.0 * s) / (s * (M - 1));
    // largest row sum of mu_{s,m,n}, valid under the guard
    const double log_mu = std::log(2.0) + M * std::log1p(-s) + std::log(M) - (M - 1) * std::log(s) -
                          std::log1p(-2.0 * s);
    const double arg = s * (1.0 - s) * (M + 1) / (1.0 - 2.0 * s);
    const double c = curve(arg);
    BoundReport r;
    r.branch = guard > 1.0 ? "energy_only" : "guard_failed";
    r.params.s = s;
    r.params.M = M;
    r.params.kappa = kappa;
    r.intermediates["mu_ub"] = std::exp(log_mu);
    r.intermediates["curve_arg"] = arg;
    r.intermediates["curve_value"] = c;
    r.intermediates["guard"] = guard;
    r.intermediates["eta_M_lower"] = 1.0 - nbar / M;
    const double cinv = curve(1.0 / kappa);
    const double log_compact = M * std::log(M + 3.0) + (M - 1) * std::log(kappa) + std::log(2.0);
    r.intermediates["compact_form"] =
        (1.0 - nbar / M) * (weighted(log_compact, cinv) + 4.0 * std::sqrt(2.0 * nbar / (kappa * M))) + 2.0 * nbar / M;
    if (guard <= 1.0) return finish(r, kInf, 0.0, 0.0);
    // ||rho - P rho P|| <= (1 - eta) + 2 sqrt(eta (1 - eta)), decreasing in eta above 0.15
    const double eta = 1.0 - nbar / M;
    const double trunc = eta < 0.5 ? 2.0 : 2.0 * ((1.0 - eta) + 2.0 * std::sqrt(eta * (1.0 - eta)));
    return finish(r, weighted(log_mu, c), 4.0 * std::sqrt(s * (1.0 + 2.0 * nbar)), trunc);
}

BoundReport generic_energy_bound(const BoundCurve& curve, double nbar, int M_max) {
    require_concave(curve, "generic_energy_bound");
    if (!(nbar >= 0.0)) throw std::invalid_argument("generic_energy_bound: nbar must be non-negative");
    if (nbar == 0.0) return classical_bound(curve, 0.0);
    const auto kappas = log_grid(std::pow(1e6, 1.0 / 40.0), 1e6, 40);
    BoundReport best;
    double best_u = kInf;
    for (int M = static_cast<int>(std::ceil(nbar)) + 1; M <= M_max; ++M)
        for (double kappa : kappas) {
            BoundReport r = generic_energy_value(curve, nbar, M, kappa);
            const double u = r.intermediates.at("unclamped");
            if (u < best_u) {
                best_u = u;
                best = std::move(r);
            }
        }
    if (!(best_u < 2.0)) {
        BoundReport t;
        t.branch = "trivial";
        if (std::isfinite(best_u)) t.intermediates = best.intermediates;
        t.intermediates["best_unclamped"] = std::isfinite(best_u) ? best_u : 2.0;
        return finish(t, 2.0, 0.0, 0.0);
    }
    return best;
}

double mu_monotone_envelope(double mu_ub, double nu, const BoundCurve& curve) {
    require_concave(curve, "mu_monotone_envelope");
    if (!(mu_ub >= 1.0) || !(nu >= 0.0)) throw std::invalid_argument("mu_monotone_envelope: need mu >= 1, nu >= 0");
    return mu_ub * curve(nu / mu_ub);
}

BoundReport extend(const BoundCurve& curve, const InputStateSpec& spec) {
    return std::visit(
        [&](const auto& st) -> BoundReport {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, state::Classical>) {
                return classical_bound(curve, st.nbar);
            } else if constexpr (std::is_same_v<T, state::FiniteNegativity>) {
                return finite_negativity_bound(curve, st.profile);
            } else if constexpr (std::is_same_v<T, state::SPAT>) {
                return spat_bound(curve, st.q);
            } else if constexpr (std::is_same_v<T, state::Fock>) {
                if (st.m == 0) return classical_bound(curve, 0.0);
                return fock_bound(curve, st.m);
            } else if constexpr (std::is_same_v<T, state::SqueezedVacuum>) {
                return squeezed_vacuum_bound(curve, st.lambda);
            } else if constexpr (std::is_same_v<T, state::KnownFock>) {
                if (st.rho.mean_photon_number() == 0.0) return classical_bound(curve, 0.0);
                return known_fock_bound(curve, st.rho);
            } else {
                return generic_energy_bound(curve, st.nbar);
            }
        },
        spec);
}

}  // namespace cvoodg
