#include "cvoodg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvoodg/quadrature.hpp"
#include "cvoodg/specfun.hpp"
#include "cvoodg/state_bounds.hpp"

namespace cvoodg::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
using LD = long double;

Eigen::Matrix2d rotation(double a) {
    Eigen::Matrix2d R;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return R;
}

GaussianChannel rotated(const GaussianChannel& c, double offset) {
    const Eigen::Matrix2d R = rotation(offset);
    return {R * c.d(), R * c.M(), R * c.N() * R.transpose()};
}

// Channel for a class at a given gap; identity at gap 0.
GaussianChannel channel_at(PairClass c, double gap) {
    switch (c) {
        case PairClass::phase_rotation: return GaussianChannel::phase_rotation(gap);
        case PairClass::displacement: return GaussianChannel::displacement(gap, 0.0);
        case PairClass::squeezing: return GaussianChannel::squeezing(gap);
        case PairClass::loss: {
            const double t = std::max(0.0, 1.0 - gap);
            return GaussianChannel::loss(t * t);
        }
    }
    throw std::invalid_argument("unsupported pair class");
}

// P_s radial factor of |m><n|, m >= n, recomputed here in long double.
LD p_radial(int m, int n, LD s, LD u /* r^2 */) {
    const int d = m - n;
    const LD x = u / (s * (1 - s));
    const LD lag = specfun::laguerre_t<LD>(n, LD(d), x);
    LD lmag = 0.5L * (LD(specfun::log_factorial(n)) - LD(specfun::log_factorial(m))) + n * std::log1p(-s) -
              (m + 1) * std::log(s) - u / s;
    if (d > 0) {
        if (u == 0) return 0;
        lmag += 0.5L * d * std::log(u);
    }
    const LD sign = (n % 2 == 0) ? 1 : -1;
    return sign * std::exp(lmag) * lag / std::numbers::pi_v<LD>;
}

// Integral of f over [0, hi] split at the sign changes of g.
template <class F, class G>
quad::Result<LD> integrate_split(F&& f, G&& g, LD hi, LD rel_tol) {
    constexpr int samples = 4000;
    std::vector<LD> cuts{0};
    LD prev_x = 0, prev = g(LD(0));
    for (int i = 1; i <= samples; ++i) {
        const LD x = hi * i / samples;
        const LD v = g(x);
        if ((prev < 0 && v > 0) || (prev > 0 && v < 0)) {
            LD a = prev_x, b = x, ga = prev;
            for (int it = 0; it < 80; ++it) {
                const LD mid = 0.5L * (a + b);
                const LD gm = g(mid);
                if ((gm < 0) == (ga < 0)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            cuts.push_back(0.5L * (a + b));
        }
        if (v != 0) {
            prev = v;
            prev_x = x;
        }
    }
    cuts.push_back(hi);
    quad::Result<LD> total;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto r = quad::integrate<LD>(f, cuts[i], cuts[i + 1], LD(0), rel_tol);
        total.value += r.value;
        total.error += r.error;
        total.l1 += r.l1;
        total.converged = total.converged && r.converged;
    }
    return total;
}

}  // namespace

std::string to_string(PairClass c) {
    switch (c) {
        case PairClass::phase_rotation: return "phase_rotation";
        case PairClass::displacement: return "displacement";
        case PairClass::squeezing: return "squeezing";
        case PairClass::loss: return "loss";
    }
    return "?";
}

PairClass parse_pair_class(const std::string& name) {
    std::string n = name;
    std::replace(n.begin(), n.end(), '-', '_');
    for (PairClass c : {PairClass::phase_rotation, PairClass::displacement, PairClass::squeezing, PairClass::loss})
        if (to_string(c) == n) return c;
    throw std::invalid_argument("unsupported channel class for the oracle: " + name);
}

std::vector<ClassTag> matching_curves(PairClass c) {
    switch (c) {
        case PairClass::phase_rotation: return {ClassTag::phase_rotation, ClassTag::gaussian};
        case PairClass::displacement: return {ClassTag::displacement, ClassTag::gaussian};
        case PairClass::squeezing: return {ClassTag::squeezing, ClassTag::gaussian};
        case PairClass::loss: return {ClassTag::gaussian, ClassTag::symmetric};
    }
    return {};
}

ChannelPairSample worst_case_pair(PairClass c, const InDistributionGuarantee& g, PairMode mode) {
    g.validate();
    const double e = g.eps0;
    const double t2 = g.tau * g.tau;
    // -log F^2(tau) demanded of the pair
    const double L = mode == PairMode::saturating ? -std::log1p(-e * e / 4.0) : -std::log1p(-e / 2.0);
    if (!std::isfinite(L)) throw std::invalid_argument("worst_case_pair: eps0 leaves no finite gap");
    double gap = 0.0;
    switch (c) {
        case PairClass::phase_rotation: {
            // F^2 = exp(-2 r^2 (1 - cos dtheta))
            const double one_minus_cos = std::min(2.0, L / (2.0 * t2));
            gap = 2.0 * std::asin(std::sqrt(one_minus_cos / 2.0));
            break;
        }
        case PairClass::displacement:
            // F^2 = exp(-|d|^2 / 4)
            gap = 2.0 * std::sqrt(L);
            break;
        case PairClass::squeezing: {
            // F^2 = a exp(-2 r^2 (1 - a)), a = sech(gap)
            const double a = specfun::lambert_w0_exp(std::log(2.0 * t2) + 2.0 * t2 - L) / (2.0 * t2);
            gap = std::acosh(1.0 / std::min(1.0, a));
            break;
        }
        case PairClass::loss:
            // F^2 = exp(-(1 - sqrt(eta))^2 r^2)
            gap = std::min(1.0, std::sqrt(L / t2));
            break;
    }
    ChannelPairSample p;
    p.pair_class = c;
    p.mode = mode;
    p.guarantee = g;
    p.gap = gap;
    p.target = GaussianChannel::identity();
    p.learned = channel_at(c, gap);
    p.achieved_eps0 = in_distribution_distance(p);
    return p;
}

ChannelPairSample scaled_pair(const ChannelPairSample& worst, double fraction, double offset) {
    ChannelPairSample p = worst;
    p.gap = worst.gap * std::clamp(fraction, 0.0, 1.0);
    p.target = rotated(GaussianChannel::identity(), offset);
    p.learned = rotated(channel_at(worst.pair_class, p.gap), offset);
    p.achieved_eps0 = in_distribution_distance(p);
    return p;
}

double exact_coherent_distance(const ChannelPairSample& pair, double r, double phi) {
    const double f2 = gaussian_output_fidelity_sq(pair.target, pair.learned, r, phi);
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - f2));
}

double in_distribution_distance(const ChannelPairSample& pair) {
    double worst = 0.0;
    for (double r : linear_grid(0.0, pair.guarantee.tau, 17))
        for (double phi : default_phi_grid()) worst = std::max(worst, exact_coherent_distance(pair, r, phi));
    return worst;
}

bool VerificationReport::passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.ok(); });
}

std::vector<double> default_r_grid() {
    std::vector<double> r;
    for (double n : log_grid(1e-3, 100.0, 60)) r.push_back(std::sqrt(n));
    return r;
}

std::vector<double> default_phi_grid() {
    std::vector<double> p(8);
    for (int i = 0; i < 8; ++i) p[i] = 2.0 * kPi * i / 8.0;
    return p;
}

Assertion dominance_suite(const BoundCurve& curve, const ChannelPairSample& pair, const std::vector<double>& r_grid,
                          const std::vector<double>& phi_grid, const std::string& name) {
    if (std::abs(curve.guarantee().eps0 - pair.guarantee.eps0) > 0.0 ||
        std::abs(curve.guarantee().tau - pair.guarantee.tau) > 0.0)
        throw std::invalid_argument("dominance_suite: curve and pair use different guarantees");
    Assertion a;
    a.name = name;
    bool first = true;
    for (double r : r_grid)
        for (double phi : phi_grid) {
            const double d = exact_coherent_distance(pair, r, phi);
            const double b = curve(r * r);
            const double slack = d - b;
            if (first || slack > a.max_slack) {
                first = false;
                a.max_slack = slack;
                a.worst_point = {{"nbar", r * r}, {"r", r}, {"phi", phi}, {"distance", d}, {"bound", b}};
            }
        }
    a.status = a.max_slack <= kViolationTol ? "pass" : "fail";
    a.detail = "pair " + to_string(pair.pair_class) + " vs curve " + cvoodg::to_string(curve.tag());
    return a;
}

double witness_gap(const BoundCurve& curve, const ChannelPairSample& pair, const std::vector<double>& r_grid) {
    double worst = 0.0;
    for (double r : r_grid) worst = std::max(worst, std::abs(exact_coherent_distance(pair, r, 0.3) - curve(r * r)));
    return worst;
}

MuNu mu_nu_numeric(int m, int n, double s) {
    if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("mu_nu_numeric: s must lie in (0, 1/2)");
    if (m < 0 || n < 0) throw std::invalid_argument("mu_nu_numeric: negative index");
    const int a = std::max(m, n);
    const int b = std::min(m, n);
    const LD sl = s;
    const LD c = sl * (1 - sl);
    // u = r^2 = c x, r dr = c dx / 2
    // x = t^2 removes the sqrt(x) endpoint behaviour at odd m - n
    auto P = [&](LD t) { return p_radial(a, b, sl, c * t * t); };
    const LD tmax = std::sqrt(8.0L * (a + b) + 160.0L);
    const LD ang = (a == b) ? 2 * std::numbers::pi_v<LD> : 4;
    auto fmu = [&](LD t) { return 2 * t * std::abs(P(t)); };
    auto fnu = [&](LD t) { return 2 * t * t * t * std::abs(P(t)); };
    const auto rmu = integrate_split(fmu, P, tmax, 1e-15L);
    const auto rnu = integrate_split(fnu, P, tmax, 1e-15L);
    if (!rmu.converged || !rnu.converged)
        throw quad::QuadratureError("mu_nu_numeric: quadrature did not converge",
                                    static_cast<double>(std::max(rmu.error, rnu.error)));
    MuNu out;
    out.mu_num = static_cast<double>(ang * c / 2 * rmu.value);
    out.nu_num = static_cast<double>(ang * c * c / 2 * rnu.value);
    out.mu_bound = std::exp(log_mu_element(a, b, s));
    out.nu_bound = out.mu_bound * nu_mu_ratio(a, b, s);
    return out;
}

double gamma_quadrature(const OffDiagLabel& l1_in, const OffDiagLabel& l2_in, double s) {
    if (!(s > 0.0 && s < 0.5)) throw std::invalid_argument("gamma_quadrature: s must lie in (0, 1/2)");
    auto canon = [](OffDiagLabel l) {
        if (l.m < l.n) {
            std::swap(l.m, l.n);
            l.theta = -l.theta;
        }
        return l;
    };
    OffDiagLabel l1 = canon(l1_in);
    OffDiagLabel l2 = canon(l2_in);
    const int d = l1.m - l1.n;
    if (d != l2.m - l2.n) return 0.0;
    // pi int P_s[A] Q[B] = Tr[C_s(A) B] is symmetric in A and B; keep the
    // lower Laguerre degree under P_s.
    if (l2.n < l1.n) std::swap(l1, l2);
    const LD sl = s;
    const LD qnorm = 0.5L * (LD(specfun::log_factorial(l2.m)) + LD(specfun::log_factorial(l2.n)));
    auto f = [&](LD u) {
        LD lq = -u - qnorm;
        if (l2.m + l2.n > 0) {
            if (u == 0) return LD(0);
            lq += 0.5L * (l2.m + l2.n) * std::log(u);
        }
        return 0.5L * p_radial(l1.m, l1.n, sl, u) * std::exp(lq) / std::numbers::pi_v<LD>;
    };
    const LD umax = (80.0L + 2.0L * (l1.m + l1.n + l2.m + l2.n)) / (1 + 1 / sl) + 10;
    const auto r = quad::integrate<LD>(f, 0.0L, umax, LD(0), 1e-12L);
    if (!r.converged) throw quad::QuadratureError("gamma_quadrature: quadrature did not converge", double(r.error));
    const double ang = d == 0 ? 2.0 * kPi : kPi * std::cos(l1.theta - l2.theta);
    return kPi * ang * static_cast<double>(r.value);
}

DeltaS delta_s_exact(int m, double s, int dim) {
    if (m < 0 || dim <= m) throw std::invalid_argument("delta_s_exact: need 0 <= m < dim");
    const FockMatrix rho = FockMatrix::fock(m, dim);
    DeltaS out;
    out.bound = 2.0 * std::sqrt(s * (1.0 + 2.0 * m));
    if (s == 0.0) return out;
    const FockMatrix sigma = additive_noise_apply(rho, s, dim);
    out.trace_deficit = 1.0 - sigma.trace();
    out.tail_warning = out.trace_deficit > 1e-8;
    out.distance = trace_norm(rho.entries() - sigma.entries());
    return out;
}

std::vector<Assertion> concavity_and_limit_suite(const std::function<BoundCurve(const InDistributionGuarantee&)>& make,
                                                 const std::string& label, const SuiteGrids& grids) {
    if (grids.eps0.empty() || grids.nbar.size() < 3) throw std::invalid_argument("concavity suite: empty grids");
    std::vector<std::vector<double>> values;
    bool concave_checked = false;
    Assertion conc{label + "/concavity", "pass", -2.0, {}, ""};
    bool first = true;
    for (double e : grids.eps0) {
        const BoundCurve c = make({e, grids.tau});
        std::vector<double> v;
        for (double x : grids.nbar) v.push_back(c(x));
        if (c.concavified()) {
            concave_checked = true;
            const std::size_t N = grids.nbar.size();
            for (std::size_t k = 1; k < N; k *= 2)
                for (std::size_t i = 0; i + k < N; ++i) {
                    const double xm = 0.5 * (grids.nbar[i] + grids.nbar[i + k]);
                    const double slack = 0.5 * (v[i] + v[i + k]) - c(xm);
                    if (first || slack > conc.max_slack) {
                        first = false;
                        conc.max_slack = slack;
                        conc.worst_point = {{"eps0", e}, {"nbar", xm}};
                    }
                }
        }
        values.push_back(std::move(v));
    }
    if (!concave_checked) {
        conc.status = "exception";
        conc.detail = "curve not concavified; concavity not required";
    } else if (conc.max_slack > grids.concavity_tol) {
        conc.status = "fail";
    }

    Assertion mono{label + "/monotone_in_eps0", "pass", -2.0, {}, ""};
    first = true;
    for (std::size_t k = 0; k + 1 < grids.eps0.size(); ++k) {
        const double hi_e = std::max(grids.eps0[k], grids.eps0[k + 1]);
        const auto& big = grids.eps0[k] >= grids.eps0[k + 1] ? values[k] : values[k + 1];
        const auto& small = grids.eps0[k] >= grids.eps0[k + 1] ? values[k + 1] : values[k];
        for (std::size_t i = 0; i < grids.nbar.size(); ++i) {
            const double slack = small[i] - big[i];
            if (first || slack > mono.max_slack) {
                first = false;
                mono.max_slack = slack;
                mono.worst_point = {{"eps0", hi_e}, {"nbar", grids.nbar[i]}};
            }
        }
    }
    if (grids.eps0.size() < 2) mono.max_slack = 0.0;
    if (mono.max_slack > kViolationTol) mono.status = "fail";

    Assertion lim{label + "/limit_eps0_to_0", "pass", -2.0, {}, ""};
    std::size_t smallest = 0;
    for (std::size_t k = 1; k < grids.eps0.size(); ++k)
        if (grids.eps0[k] < grids.eps0[smallest]) smallest = k;
    first = true;
    for (std::size_t i = 0; i < grids.nbar.size(); ++i) {
        const double slack = values[smallest][i] - grids.limit_tol;
        if (first || slack > lim.max_slack) {
            first = false;
            lim.max_slack = slack;
            lim.worst_point = {{"eps0", grids.eps0[smallest]}, {"nbar", grids.nbar[i]}};
        }
    }
    if (lim.max_slack > 0.0) {
        const BoundCurve probe = make({grids.eps0[smallest], grids.tau});
        if (probe.tag() == ClassTag::step) {
            lim.status = "exception";
            lim.detail = "step curve stays at 2 beyond tau^2 for every eps0";
        } else if (probe.tag() == ClassTag::lipschitz) {
            lim.status = "exception";
            lim.detail = "lipschitz curve does not depend on eps0 beyond tau^2";
        } else {
            lim.status = "fail";
        }
    }
    return {conc, mono, lim};
}

double phase_rotation_output_distance(const FockMatrix& rho, double dtheta) {
    Eigen::MatrixXcd diff = rho.entries();
    for (int m = 0; m < rho.dim(); ++m)
        for (int n = 0; n < rho.dim(); ++n) diff(m, n) *= std::polar(1.0, -dtheta * (m - n)) - 1.0;
    return trace_norm(diff);
}

double displacement_output_distance(const FockMatrix& rho, cplx alpha, int work_dim) {
    const int dim = rho.dim();
    if (work_dim < dim) throw std::invalid_argument("displacement_output_distance: work_dim below dim");
    const double x = std::norm(alpha);
    // <m|D|n> = sqrt(n!/m!) alpha^{m-n} e^{-x/2} L_n^{m-n}(x) for m >= n
    Eigen::MatrixXcd D(work_dim, dim);
    for (int m = 0; m < work_dim; ++m)
        for (int n = 0; n < dim; ++n) {
            const int lo = std::min(m, n), hi = std::max(m, n);
            const cplx base = m >= n ? alpha : -std::conj(alpha);
            const double lag = specfun::laguerre(lo, hi - lo, x);
            const double mag = std::exp(0.5 * (specfun::log_factorial(lo) - specfun::log_factorial(hi)) - 0.5 * x);
            D(m, n) = mag * lag * std::pow(base, hi - lo);
        }
    Eigen::MatrixXcd diff = D * rho.entries() * D.adjoint();
    diff.topLeftCorner(dim, dim) -= rho.entries();
    return trace_norm(diff);
}

FockMatrix spat_fock(double q, int dim) {
    if (!(q > 0.0) || dim < 2) throw std::invalid_argument("spat_fock: need q > 0 and dim >= 2");
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
    double total = 0.0;
    for (int k = 1; k < dim; ++k) {
        const double p = std::exp(std::log(k) + (k - 1) * std::log(q) - (k + 1) * std::log1p(q));
        e(k, k) = p;
        total += p;
    }
    return FockMatrix(e / total);
}

std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

}  // namespace cvoodg::oracle
