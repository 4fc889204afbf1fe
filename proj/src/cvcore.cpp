#include "cvoodg/cvcore.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "cvoodg/quadrature.hpp"
#include "cvoodg/specfun.hpp"

namespace cvoodg {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

GaussianMoments GaussianMoments::coherent(double r, double phi) {
    GaussianMoments g;
    g.q = Eigen::Vector2d(2.0 * r * std::cos(phi), 2.0 * r * std::sin(phi));
    return g;
}

bool GaussianMoments::physical(double tol) const {
    if (std::abs(V(0, 1) - V(1, 0)) > tol) return false;
    Eigen::Matrix2cd h = V.cast<cplx>();
    h(0, 1) += cplx(0.0, 1.0);
    h(1, 0) -= cplx(0.0, 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

GaussianChannel::GaussianChannel(Eigen::Vector2d d, Eigen::Matrix2d M, Eigen::Matrix2d N)
    : d_(std::move(d)), M_(std::move(M)), N_(std::move(N)) {
    constexpr double tol = 1e-12;
    require(d_.allFinite() && M_.allFinite() && N_.allFinite(), "GaussianChannel: non-finite entries");
    require(std::abs(N_(0, 1) - N_(1, 0)) <= tol, "GaussianChannel: N must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(N_, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -tol, "GaussianChannel: N must be positive semidefinite");
    const double dm = M_.determinant() - 1.0;
    require(N_.determinant() >= dm * dm - tol, "GaussianChannel: det N < (det M - 1)^2");
}

GaussianChannel GaussianChannel::identity() {
    return {Eigen::Vector2d::Zero(), Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero()};
}

GaussianChannel GaussianChannel::displacement(double dx, double dy) {
    return {Eigen::Vector2d(dx, dy), Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero()};
}

GaussianChannel GaussianChannel::phase_rotation(double theta) {
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return {Eigen::Vector2d::Zero(), R, Eigen::Matrix2d::Zero()};
}

GaussianChannel GaussianChannel::squeezing(double r) {
    Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
    S(0, 0) = std::exp(-r);
    S(1, 1) = std::exp(r);
    return {Eigen::Vector2d::Zero(), S, Eigen::Matrix2d::Zero()};
}

GaussianChannel GaussianChannel::loss(double eta) {
    require(eta >= 0.0 && eta <= 1.0, "GaussianChannel::loss: eta outside [0,1]");
    return {Eigen::Vector2d::Zero(), std::sqrt(eta) * Eigen::Matrix2d::Identity(),
            (1.0 - eta) * Eigen::Matrix2d::Identity()};
}

FockMatrix::FockMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
    require(m_.rows() == m_.cols() && m_.rows() > 0, "FockMatrix: must be square and non-empty");
    require(m_.allFinite(), "FockMatrix: non-finite entries");
    require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= 1e-12, "FockMatrix: not Hermitian");
    const double tr = m_.trace().real();
    require(tr >= -1e-12 && tr <= 1.0 + 1e-12, "FockMatrix: trace outside [0, 1]");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-10, "FockMatrix: negative eigenvalue");
}

FockMatrix FockMatrix::from_pure(const Eigen::VectorXcd& psi) { return FockMatrix(psi * psi.adjoint()); }

FockMatrix FockMatrix::fock(int m, int dim) {
    require(m >= 0 && m < dim, "FockMatrix::fock: index outside dimension");
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(dim, dim);
    e(m, m) = 1.0;
    return FockMatrix(e);
}

FockMatrix FockMatrix::coherent(cplx alpha, int dim) { return from_pure(coherent_fock_vector(alpha, dim)); }

FockMatrix FockMatrix::squeezed_vacuum(double lambda, int dim) {
    require(lambda > -1.0 && lambda < 1.0, "FockMatrix::squeezed_vacuum: |lambda| >= 1");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    const double norm = 0.25 * std::log1p(-lambda * lambda);
    for (int p = 0; 2 * p < dim; ++p) {
        const double lmag = norm + 0.5 * specfun::log_factorial(2 * p) - p * std::log(2.0) - specfun::log_factorial(p);
        const double lp = (p == 0) ? 1.0 : std::pow(lambda, p);
        psi(2 * p) = lp * std::exp(lmag);
    }
    return from_pure(psi);
}

double FockMatrix::mean_photon_number() const {
    double n = 0.0;
    for (int i = 0; i < dim(); ++i) n += i * m_(i, i).real();
    return n;
}

GaussianMoments apply_gaussian(const GaussianChannel& c, const GaussianMoments& in) {
    GaussianMoments out;
    out.q = c.M() * in.q + c.d();
    out.V = c.M() * in.V * c.M().transpose() + c.N();
    return out;
}

double gaussian_output_fidelity_sq(const GaussianChannel& c1, const GaussianChannel& c2, double r, double phi) {
    const Eigen::Vector2d q(2.0 * r * std::cos(phi), 2.0 * r * std::sin(phi));
    const Eigen::Vector2d mu = (c2.M() - c1.M()) * q + (c2.d() - c1.d());
    const Eigen::Matrix2d V1 = c1.M() * c1.M().transpose() + c1.N();
    const Eigen::Matrix2d V2 = c2.M() * c2.M().transpose() + c2.N();
    const Eigen::Matrix2d S = V1 + V2;
    const double Delta = S.determinant();
    if (!(std::abs(Delta) > 1e-300)) throw std::domain_error("gaussian_output_fidelity_sq: V1 + V2 is singular");
    const double delta = (V1.determinant() - 1.0) * (V2.determinant() - 1.0);
    const double quad = mu.dot(S.inverse() * mu);
    const double sd = std::sqrt(std::max(delta, 0.0));
    return 2.0 * std::exp(-0.5 * quad) / (std::sqrt(Delta + delta) - sd);
}

int default_coherent_dim(cplx alpha) {
    return static_cast<int>(std::ceil(4.0 * (std::norm(alpha) + 1.0))) + 10;
}

Eigen::VectorXcd coherent_fock_vector(cplx alpha, int dim) {
    require(dim > 0, "coherent_fock_vector: dim must be positive");
    Eigen::VectorXcd v(dim);
    const double a2 = std::norm(alpha);
    const double la = std::log(std::abs(alpha));
    const double arg = std::arg(alpha);
    v(0) = std::exp(-0.5 * a2);
    for (int m = 1; m < dim; ++m) {
        if (a2 == 0.0) {
            v(m) = 0.0;
            continue;
        }
        const double lmag = -0.5 * a2 + m * la - 0.5 * specfun::log_factorial(m);
        v(m) = std::polar(std::exp(lmag), m * arg);
    }
    return v;
}

double trace_norm(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const FockMatrix& rho, const FockMatrix& sigma) {
    require(rho.dim() == sigma.dim(), "trace_distance: dimension mismatch");
    return trace_norm(rho.entries() - sigma.entries());
}

double p_rep_radial(int m, int n, double s, double r) {
    if (m < n) std::swap(m, n);
    const int delta = m - n;
    const double x = r * r / (s * (1.0 - s));
    const double lag = specfun::laguerre(n, delta, x);
    if (lag == 0.0) return 0.0;
    double lmag = 0.5 * (specfun::log_factorial(n) - specfun::log_factorial(m)) + n * std::log1p(-s) -
                  (m + 1) * std::log(s) - r * r / s;
    if (delta > 0) {
        if (r == 0.0) return 0.0;
        lmag += delta * std::log(r);
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    return sign / kPi * std::exp(lmag) * lag;
}

double p_rep_fock_element(const OffDiagLabel& label, double s, double r, double phi) {
    const double radial = p_rep_radial(label.m, label.n, s, r);
    if (label.m == label.n) return radial;
    // the (n, m, theta) element equals the (m, n, -theta) one
    const double theta = label.m > label.n ? label.theta : -label.theta;
    const int delta = std::abs(label.m - label.n);
    return std::cos(theta - delta * phi) * radial;
}

double gamma_polynomial(int m1, int m2, int delta, double s) {
    const int n1 = m1 - delta;
    const int n2 = m2 - delta;
    double sum = 0.0;
    for (int k = 0; k <= n1; ++k) {
        const double lt = specfun::log_binomial(n1, k) + specfun::log_factorial(n2) - specfun::log_factorial(n2 - k) +
                          specfun::log_factorial(delta) - specfun::log_factorial(delta + k);
        const double sp = (n1 == k) ? 1.0 : std::pow(s, 2 * (n1 - k));
        sum += std::exp(lt) * sp;
    }
    return sum;
}

double gamma_overlap(const OffDiagLabel& l1, const OffDiagLabel& l2, double s) {
    auto canon = [](OffDiagLabel l) {
        if (l.m < l.n) {
            std::swap(l.m, l.n);
            l.theta = -l.theta;
        }
        return l;
    };
    OffDiagLabel a = canon(l1);
    OffDiagLabel b = canon(l2);
    const int delta = a.m - a.n;
    if (delta != b.m - b.n) return 0.0;
    if (a.m > b.m) std::swap(a, b);
    const double G = gamma_polynomial(a.m, b.m, delta, s);
    const double sp = std::pow(s, b.m - a.m);
    if (delta == 0) return sp * G / std::pow(1.0 + s, a.m + b.m + 1);
    const double binom = std::exp(0.5 * (specfun::log_binomial(a.m, delta) + specfun::log_binomial(b.m, delta)));
    return 0.5 * std::cos(a.theta - b.theta) * binom * sp * G / std::pow(1.0 + s, a.m + b.m + 1 - delta);
}

double additive_noise_kernel(int m, int n, int j, int k, double s, double* achieved_error) {
    if (achieved_error) *achieved_error = 0.0;
    if (j - k != m - n) return 0.0;
    // C_s is self-adjoint, so the roles of (m,n) and (j,k) may be swapped; put
    // the smaller Laguerre degree under P_s to avoid large cancellations.
    if (std::min(j, k) < std::min(m, n)) {
        std::swap(m, j);
        std::swap(n, k);
    }
    const int a = std::max(m, n);
    const int b = std::min(m, n);
    const int delta = a - b;
    const int jj = std::max(j, k);
    const int kk = std::min(j, k);

    using LD = long double;
    const LD sl = s;
    const LD c = 1.0L / (1.0L - sl * sl);
    // integrand in t = r^2 (1+s)/s
    auto f = [&](LD t) -> LD {
        if (t <= 0) return jj == 0 ? specfun::laguerre_t<LD>(b, delta, 0) : 0.0L;
        return std::exp(-t + jj * std::log(t)) * specfun::laguerre_t<LD>(b, LD(delta), t * c);
    };
    const double spec_t = s < 0.5 ? 16.0 * std::log(10.0) * 2.0 * (1.0 - s) * (1.0 + s) / (1.0 - 2.0 * s) : 0.0;
    const double poly_t = jj + b + 45.0 + 15.0 * std::sqrt(jj + b + 1.0);
    const LD T = std::max(spec_t, poly_t);

    const double lpref = 0.5 * (specfun::log_factorial(b) - specfun::log_factorial(a) - specfun::log_factorial(jj) -
                                specfun::log_factorial(kk)) +
                         b * std::log1p(-s) + (jj - a) * std::log(s) - (jj + 1) * std::log1p(s);
    const double pref = ((b % 2 == 0) ? 1.0 : -1.0) * std::exp(lpref);
    const LD tol = 1e-10L / std::max(std::abs(pref), 1e-300);
    const auto res = quad::integrate<LD>(f, 0.0L, T, tol);
    const double err = std::abs(pref) * static_cast<double>(res.error);
    if (achieved_error) *achieved_error = err;
    if (!res.converged) throw quad::QuadratureError("additive_noise_kernel: radial quadrature did not converge", err);
    return pref * static_cast<double>(res.value);
}

FockMatrix additive_noise_apply(const FockMatrix& rho, double s, int out_dim, double* achieved_error) {
    require(s > 0.0 && s < 1.0, "additive_noise_apply: s must lie in (0,1)");
    require(out_dim > 0, "additive_noise_apply: out_dim must be positive");
    const int d = rho.dim();
    std::map<std::tuple<int, int, int, int>, double> cache;
    double worst = 0.0;
    auto kernel = [&](int m, int n, int j, int k) {
        // K depends only on the ordered (max, min) pairs
        auto key = std::make_tuple(std::max(m, n), std::min(m, n), std::max(j, k), std::min(j, k));
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        double e = 0.0;
        const double v = additive_noise_kernel(m, n, j, k, s, &e);
        worst = std::max(worst, e);
        cache.emplace(key, v);
        return v;
    };

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, out_dim);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            const cplx rmn = rho(m, n);
            if (rmn == cplx(0.0)) continue;
            const int delta = m - n;
            for (int j = std::max(0, delta); j < out_dim; ++j) {
                const int k = j - delta;
                if (k < 0 || k >= out_dim) continue;
                out(j, k) += rmn * kernel(m, n, j, k);
            }
        }
    }
    if (achieved_error) *achieved_error = worst;
    // restore exact Hermiticity lost to summation order
    out = 0.5 * (out + out.adjoint()).eval();
    return FockMatrix(out, FockMatrix::Unchecked{});
}

double delta_s_bound(double nbar, double s) {
    require(nbar >= 0.0 && s >= 0.0, "delta_s_bound: negative argument");
    return 2.0 * std::sqrt(s * (1.0 + 2.0 * nbar));
}

std::pair<FockMatrix, double> truncate_energy(const FockMatrix& rho, int M) {
    require(M > 0, "truncate_energy: M must be positive");
    Eigen::MatrixXcd e = rho.entries();
    const int d = rho.dim();
    for (int i = std::min(M, d); i < d; ++i) {
        e.row(i).setZero();
        e.col(i).setZero();
    }
    const double eta = e.trace().real();
    return {FockMatrix(e, FockMatrix::Unchecked{}), eta};
}

}  // namespace cvoodg
