#include "cvoodg/coherent_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "cvoodg/optimize.hpp"
#include "cvoodg/specfun.hpp"

namespace cvoodg {

namespace {

constexpr double kPi = std::numbers::pi;

// 2 sqrt(1 - exp(log_f2)) without cancellation for log_f2 near 0
double distance_from_log_fidelity_sq(double log_f2) {
    if (log_f2 >= 0.0) return 0.0;
    return 2.0 * std::sqrt(-std::expm1(log_f2));
}

double clamp2(double v) {
    if (std::isnan(v)) return 2.0;
    return std::clamp(v, 0.0, 2.0);
}

void require_eps_below_two(const InDistributionGuarantee& g, const char* who) {
    g.validate();
    if (!(g.eps0 < 2.0)) throw std::invalid_argument(std::string(who) + ": requires eps0 < 2");
}

}  // namespace

std::string to_string(ClassTag tag) {
    switch (tag) {
        case ClassTag::step: return "step";
        case ClassTag::lipschitz: return "lipschitz";
        case ClassTag::gaussian: return "gaussian";
        case ClassTag::phase_rotation: return "phase_rotation";
        case ClassTag::squeezing: return "squeezing";
        case ClassTag::displacement: return "displacement";
        case ClassTag::symmetric: return "symmetric";
        case ClassTag::cubic_phase: return "cubic_phase";
        case ClassTag::universal: return "universal";
        case ClassTag::custom: return "custom";
    }
    return "custom";
}

ClassTag parse_class_tag(const std::string& name) {
    std::string n = name;
    std::replace(n.begin(), n.end(), '-', '_');
    for (ClassTag t : {ClassTag::step, ClassTag::lipschitz, ClassTag::gaussian, ClassTag::phase_rotation,
                       ClassTag::squeezing, ClassTag::displacement, ClassTag::symmetric, ClassTag::cubic_phase,
                       ClassTag::universal, ClassTag::custom})
        if (to_string(t) == n) return t;
    if (n == "pr") return ClassTag::phase_rotation;
    throw std::invalid_argument("unknown class tag: " + name);
}

void InDistributionGuarantee::validate() const {
    if (!(eps0 >= 0.0 && eps0 <= 2.0)) throw std::invalid_argument("eps0 must lie in [0, 2]");
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
}

BoundCurve::BoundCurve(ClassTag tag, InDistributionGuarantee g, Fn eval, bool concavified)
    : tag_(tag), g_(g), eval_(std::make_shared<const Fn>(std::move(eval))), concavified_(concavified) {
    g_.validate();
}

double BoundCurve::operator()(double nbar) const {
    if (!(nbar >= 0.0)) throw std::domain_error("BoundCurve: nbar must be non-negative");
    return clamp2((*eval_)(nbar));
}

double BoundCurve::combined(double nbar) const {
    const double step = nbar <= g_.tau * g_.tau ? g_.eps0 : 2.0;
    return std::min((*this)(nbar), step);
}

BoundCurve step_bound(const InDistributionGuarantee& g) {
    g.validate();
    const double t2 = g.tau * g.tau;
    const double e = g.eps0;
    return {ClassTag::step, g, [t2, e](double n) { return n <= t2 ? e : 2.0; }, false};
}

BoundCurve lipschitz_bound(const InDistributionGuarantee& g) {
    g.validate();
    const double tau = g.tau;
    const double e = g.eps0;
    return {ClassTag::lipschitz, g,
            [tau, e](double n) {
                const double r = std::sqrt(n);
                if (r <= tau) return e;
                const double dr = r - tau;
                return e + 4.0 * std::sqrt(-std::expm1(-dr * dr));
            },
            false};
}

BoundCurve gaussian_bound(const InDistributionGuarantee& g) {
    require_eps_below_two(g, "gaussian_bound");
    const double lb = std::log1p(-g.eps0 / 2.0);
    const double tau = g.tau;
    return {ClassTag::gaussian, g,
            [lb, tau](double n) {
                const double expo = 2.0 * n / (tau * tau) + std::sqrt(n) / tau + 2.0;
                return distance_from_log_fidelity_sq(expo * lb);
            },
            true};
}

BoundCurve phase_rotation_bound(const InDistributionGuarantee& g) {
    require_eps_below_two(g, "phase_rotation_bound");
    const double lb = std::log1p(-g.eps0 / 2.0);
    const double t2 = g.tau * g.tau;
    return {ClassTag::phase_rotation, g, [lb, t2](double n) { return distance_from_log_fidelity_sq(n / t2 * lb); },
            true};
}

namespace {

// delta = 2 tau^2 - W0(2 tau^2 e^{2 tau^2} (1 - eps0/2)), seeded from lambert_w0
// and polished on log1p(-delta/c) - delta = log1p(-eps0/2), c = 2 tau^2.
double squeezing_delta(const InDistributionGuarantee& g) {
    const double c = 2.0 * g.tau * g.tau;
    const double L = std::log1p(-g.eps0 / 2.0);
    if (L == 0.0) return 0.0;
    const double w = specfun::lambert_w0_exp(c + std::log(g.tau * g.tau * (2.0 - g.eps0)));
    double d = std::clamp(c - w, 0.0, c * (1.0 - 1e-300));
    for (int i = 0; i < 4; ++i) {
        const double gval = std::log1p(-d / c) - d - L;
        const double gp = -1.0 / (c - d) - 1.0;
        const double next = d - gval / gp;
        if (!(next >= 0.0) || !(next < c)) break;
        d = next;
    }
    return d;
}

}  // namespace

double squeezing_sech_min(const InDistributionGuarantee& g) {
    const double c = 2.0 * g.tau * g.tau;
    return 1.0 - squeezing_delta(g) / c;
}

BoundCurve squeezing_bound(const InDistributionGuarantee& g) {
    require_eps_below_two(g, "squeezing_bound");
    const double d = squeezing_delta(g);
    const double t2 = g.tau * g.tau;
    const double log_a = std::log1p(-d / (2.0 * t2));
    // W/tau^2 - 2 = -delta/tau^2
    const double slope = -d / t2;
    return {ClassTag::squeezing, g, [log_a, slope](double n) { return distance_from_log_fidelity_sq(log_a + n * slope); },
            true};
}

BoundCurve displacement_bound(const InDistributionGuarantee& g) {
    require_eps_below_two(g, "displacement_bound");
    const double e = g.eps0;
    return {ClassTag::displacement, g, [e](double) { return e; }, true};
}

BoundCurve symmetric_gaussian_bound(const InDistributionGuarantee& g) {
    require_eps_below_two(g, "symmetric_gaussian_bound");
    const double lb = std::log1p(-g.eps0 / 2.0);
    const double t2 = g.tau * g.tau;
    return {ClassTag::symmetric, g,
            [lb, t2](double n) { return distance_from_log_fidelity_sq(2.0 * (n / t2 + 1.0) * lb); }, true};
}

double cubic_phase_fidelity(double delta, double x) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    constexpr double half_width = 12.0;
    const double centre = 2.0 * x;
    if (delta == 0.0) return 1.0;
    // q = centre + y; the constant phase delta*centre^3 drops out of |.|
    const double qmax = std::abs(centre) + half_width;
    const double omega = 3.0 * std::abs(delta) * qmax * qmax;
    const double h = std::min(0.5, 1.5 / omega);
    const int panels = static_cast<int>(std::ceil(2.0 * half_width / h));
    const double hw = 2.0 * half_width / panels;

    const auto& absc = GL::abscissa();
    const auto& wts = GL::weights();
    auto phase = [&](double y) {
        return delta * (3.0 * centre * centre * y + 3.0 * centre * y * y + y * y * y);
    };
    std::complex<double> acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = -half_width + p * hw;
        const double mid = a + 0.5 * hw;
        const double rad = 0.5 * hw;
        std::complex<double> panel = 0.0;
        for (std::size_t i = 0; i < absc.size(); ++i) {
            const double xi = absc[i];
            for (double sgn : {-1.0, 1.0}) {
                if (xi == 0.0 && sgn > 0) continue;
                const double y = mid + sgn * rad * xi;
                panel += wts[i] * std::exp(-0.5 * y * y) * std::polar(1.0, phase(y));
            }
        }
        acc += rad * panel;
    }
    return std::min(1.0, std::abs(acc) / std::sqrt(2.0 * kPi));
}

CubicPhaseFit cubic_phase_fit(const InDistributionGuarantee& g) {
    require_eps_below_two(g, "cubic_phase_bound");
    const auto xs = linear_grid(0.0, g.tau, 17);
    CubicPhaseFit fit;
    auto worst = [&](double delta, bool* monotone) {
        double prev = 2.0;
        double w = 0.0;
        for (double x : xs) {
            const double F = cubic_phase_fidelity(delta, x);
            if (F > prev + 1e-12 && monotone) *monotone = false;
            prev = F;
            w = std::max(w, 2.0 * std::sqrt(std::max(0.0, (1.0 - F) * (1.0 + F))));
        }
        return w;
    };
    double lo = 0.0;
    double hi = 1e-3;
    while (worst(hi, nullptr) <= g.eps0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e4) throw std::runtime_error("cubic_phase_bound: bisection could not be bracketed");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (worst(mid, nullptr) <= g.eps0 ? lo : hi) = mid;
    }
    fit.delta_max = lo;
    bool mono = true;
    worst(lo, &mono);
    fit.monotone_in_x = mono;
    return fit;
}

BoundCurve cubic_phase_bound(const InDistributionGuarantee& g, GridSpec grid) {
    const CubicPhaseFit fit = cubic_phase_fit(g);
    const double delta = fit.delta_max;
    BoundCurve raw(ClassTag::cubic_phase, g,
                   [delta](double n) {
                       const double F = cubic_phase_fidelity(delta, std::sqrt(n));
                       return 2.0 * std::sqrt(std::max(0.0, (1.0 - F) * (1.0 + F)));
                   },
                   false);
    return concave_hull(raw, grid.nbar_max, grid.points, HullMode::certified);
}

namespace {

// Terms of the double sum over (m, n) restricted to a window of indices
// around r^2; the rest is bounded through xi <= 2 and returned as `tail`.
struct UniversalSeries {
    int lo = 0;
    int hi = 0;
    std::vector<double> la;  // log a_m on the window
    // per ordered pair m >= n in the window: index offsets and the
    // s-independent parts of log xi and of log(weight)
    std::vector<int> n_idx;
    std::vector<int> d_idx;
    std::vector<double> xi_base;
    std::vector<double> w_base;
    double tail = 0.0;  // e^{-r^2} sum over pairs outside the window of r^{m+n}/sqrt(m!n!)
};

UniversalSeries universal_series(double r) {
    UniversalSeries u;
    const double r2 = r * r;
    const double lr = std::log(r);
    auto log_a = [&](int m) { return m == 0 ? -0.5 * r2 : -0.5 * r2 + m * lr - 0.5 * specfun::log_factorial(m); };
    u.lo = std::max(0, static_cast<int>(std::floor(r2 - 10.5 * r - 10.0)));
    u.hi = std::max(40, static_cast<int>(std::ceil(r2 + 10.5 * r + 10.0)));
    double W = 0.0;
    for (int m = u.lo; m <= u.hi; ++m) {
        u.la.push_back(log_a(m));
        W += std::exp(u.la.back());
    }
    // mass of a_m outside the window: direct below, geometric bound above
    // with ratio r / sqrt(hi + 2) < 1
    double outside = 0.0;
    for (int m = 0; m < u.lo; ++m) outside += std::exp(log_a(m));
    if (r > 0.0) {
        const double ratio = r / std::sqrt(u.hi + 2.0);
        outside += std::exp(log_a(u.hi + 1)) / (1.0 - ratio);
    }
    u.tail = outside * (outside + 2.0 * W) + 1e-15 * W * W;

    const double log2 = std::log(2.0);
    const double logpi = std::log(kPi);
    for (int m = u.lo; m <= u.hi; ++m)
        for (int n = u.lo; n <= m; ++n) {
            const int d = m - n;
            const double la_sum = u.la[m - u.lo] + u.la[n - u.lo];
            if (la_sum < -800.0) continue;
            u.n_idx.push_back(n);
            u.d_idx.push_back(d);
            if (d == 0) {
                u.xi_base.push_back(log2);
                u.w_base.push_back(la_sum);
            } else {
                u.xi_base.push_back((2.0 + 0.5 * d) * log2 - logpi + 0.5 * specfun::log_factorial(m) -
                                    0.5 * specfun::log_factorial(n) - specfun::log_factorial(d));
                u.w_base.push_back(la_sum + log2);
            }
        }
    return u;
}

// Early exit once the partial sum passes `cap`: the clamp to 2 makes the
// remainder irrelevant and the partial sum is itself a valid lower estimate.
double universal_objective(const InDistributionGuarantee& g, double r, double s, const UniversalSeries& u,
                           double cap = 4.0) {
    const double e0 = g.eps0;
    const double X = g.tau * g.tau * (1.0 - 2.0 * s) / (2.0 * s * (1.0 - s));
    const double l1s = std::log1p(-s);
    const double ls = std::log(s);
    const double l12s = std::log1p(-2.0 * s);
    const double A = l1s - ls;
    const double log2 = std::log(2.0);
    const int dmax = u.hi - u.lo;

    // E_d collects the s-dependent part of log xi that depends on d only;
    // log xi = xi_base + n A + E_d
    std::vector<double> E(dmax + 1);
    E[0] = l1s - l12s + std::log(e0 + (2.0 - e0) * std::exp(-X));
    for (int d = 1; d <= dmax; ++d) {
        const double a = 1.0 + 0.5 * d;
        const double t1 = e0 > 0.0 ? std::log(e0) + std::lgamma(a) : -std::numeric_limits<double>::infinity();
        const double t2 = std::log(2.0 - e0) + specfun::log_gamma_upper(a, X);
        E[d] = 0.5 * d * A + l1s - a * l12s + specfun::log_add(t1, t2);
    }

    double sum = 2.0 * u.tail + 4.0 * std::sqrt(s * (1.0 + 2.0 * r * r));
    const std::size_t N = u.n_idx.size();
    for (std::size_t i = 0; i < N; ++i) {
        const double lx = u.xi_base[i] + u.n_idx[i] * A + E[u.d_idx[i]];
        sum += std::exp(std::min(lx, log2) + u.w_base[i]);
        if ((i & 1023) == 0 && sum > cap) return sum;
    }
    return sum;
}

}  // namespace

double universal_coherent_objective(const InDistributionGuarantee& g, double r, double s) {
    g.validate();
    if (!(s > 0.0 && s < 0.5)) throw std::domain_error("universal_coherent_objective: s must lie in (0, 1/2)");
    return universal_objective(g, r, s, universal_series(r));
}

UniversalPoint universal_coherent_point(const InDistributionGuarantee& g, double r, double s_lo, double s_hi) {
    require_eps_below_two(g, "universal_coherent_bound");
    if (!(r >= 0.0)) throw std::domain_error("universal_coherent_bound: r must be non-negative");
    const UniversalSeries u = universal_series(r);
    const auto best = opt::golden_log([&](double s) { return universal_objective(g, r, s, u); }, s_lo, s_hi);
    UniversalPoint p;
    p.unclamped = best.f;
    p.value = clamp2(best.f);
    p.s = best.x;
    p.tail = 2.0 * u.tail;
    p.K = u.hi;
    return p;
}

double universal_coherent_bound(const InDistributionGuarantee& g, double r) {
    return universal_coherent_point(g, r).value;
}

BoundCurve universal_curve(const InDistributionGuarantee& g, GridSpec grid) {
    require_eps_below_two(g, "universal_curve");
    BoundCurve raw(ClassTag::universal, g, [g](double n) { return universal_coherent_bound(g, std::sqrt(n)); }, false);
    return concave_hull(raw, grid.nbar_max, grid.points, HullMode::certified);
}

std::vector<std::size_t> upper_hull_indices(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::size_t> h;
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (h.size() >= 2) {
            const std::size_t a = h[h.size() - 2];
            const std::size_t b = h.back();
            // drop b if it lies on or below the chord a -> i
            const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
            if (cross >= 0.0)
                h.pop_back();
            else
                break;
        }
        h.push_back(i);
    }
    return h;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 2) return {lo};
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = (i == points - 1) ? hi : lo + (hi - lo) * i / (points - 1);
    return g;
}

std::vector<double> log_grid(double lo, double hi, int points) {
    if (points < 2) return {lo};
    std::vector<double> g(points);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (int i = 0; i < points; ++i) g[i] = (i == 0) ? lo : (i == points - 1) ? hi : std::exp(a + (b - a) * i / (points - 1));
    return g;
}

BoundCurve concave_hull(const BoundCurve& curve, double grid_max, int grid_points, HullMode mode) {
    if (grid_points < 3) throw std::invalid_argument("concave_hull: need at least 3 grid points");
    if (!(grid_max > 0.0)) throw std::invalid_argument("concave_hull: grid_max must be positive");
    const auto xs = linear_grid(0.0, grid_max, grid_points);
    std::vector<double> fs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = curve(xs[i]);
    std::vector<double> ys = fs;
    if (mode == HullMode::certified)
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) ys[i] = std::max(fs[i], fs[i + 1]);

    const auto idx = upper_hull_indices(xs, ys);
    std::vector<double> hx, hy;
    for (auto i : idx) {
        hx.push_back(xs[i]);
        hy.push_back(ys[i]);
    }
    double tail_slope = 0.0;
    if (hx.size() >= 2) tail_slope = std::max(0.0, (hy.back() - hy[hy.size() - 2]) / (hx.back() - hx[hx.size() - 2]));

    auto eval = [hx, hy, tail_slope](double n) {
        if (n >= hx.back()) return std::min(2.0, hy.back() + tail_slope * (n - hx.back()));
        const auto it = std::upper_bound(hx.begin(), hx.end(), n);
        const std::size_t j = static_cast<std::size_t>(it - hx.begin());
        if (j == 0) return hy.front();
        const double t = (n - hx[j - 1]) / (hx[j] - hx[j - 1]);
        return hy[j - 1] + t * (hy[j] - hy[j - 1]);
    };
    return {curve.tag(), curve.guarantee(), eval, true};
}

BoundCurve make_curve(ClassTag tag, const InDistributionGuarantee& g, GridSpec grid) {
    switch (tag) {
        case ClassTag::step: return step_bound(g);
        case ClassTag::lipschitz: return lipschitz_bound(g);
        case ClassTag::gaussian: return gaussian_bound(g);
        case ClassTag::phase_rotation: return phase_rotation_bound(g);
        case ClassTag::squeezing: return squeezing_bound(g);
        case ClassTag::displacement: return displacement_bound(g);
        case ClassTag::symmetric: return symmetric_gaussian_bound(g);
        case ClassTag::cubic_phase: return cubic_phase_bound(g, grid);
        case ClassTag::universal: return universal_curve(g, grid);
        case ClassTag::custom: break;
    }
    throw std::invalid_argument("make_curve: no constructor for class " + to_string(tag));
}

}  // namespace cvoodg
