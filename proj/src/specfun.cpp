#include "cvoodg/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

namespace cvoodg::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvE = 0.36787944117144233;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite argument");
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

double SignedLog::value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
}

SignedLog operator*(SignedLog a, SignedLog b) {
    if (a.sign == 0 || b.sign == 0) return {0, -kInf};
    return {a.sign * b.sign, a.log_abs + b.log_abs};
}

SignedLog operator/(SignedLog a, SignedLog b) {
    if (b.sign == 0) throw std::domain_error("SignedLog: division by zero");
    if (a.sign == 0) return {0, -kInf};
    return {a.sign * b.sign, a.log_abs - b.log_abs};
}

SignedLog signed_log(double x) {
    if (x == 0.0) return {0, -kInf};
    return {x > 0 ? 1 : -1, std::log(std::abs(x))};
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

double lambert_w0(double x) {
    require_finite(x, "lambert_w0");
    if (x < -kInvE) {
        // allow the rounding of -1/e itself
        if (x < -kInvE * (1.0 + 4 * std::numeric_limits<double>::epsilon()))
            throw std::domain_error("lambert_w0: x < -1/e");
        return -1.0;
    }
    if (x == 0.0) return 0.0;

    double w;
    if (x < -0.25) {
        // series about the branch point in p = sqrt(2(ex + 1))
        const double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x);
        w *= 1.0 - std::log1p(w) / (2.0 + w);
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int it = 0; it < 64; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 <= 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
    }
    return std::max(w, -1.0);
}

double lambert_w0_exp(double log_x) {
    if (std::isnan(log_x)) throw std::domain_error("lambert_w0_exp: NaN argument");
    if (log_x < 700.0) return lambert_w0(std::exp(log_x));
    // w + log w = log_x, Newton from the two-term asymptote
    double w = log_x - std::log(log_x);
    for (int it = 0; it < 50; ++it) {
        const double step = (w + std::log(w) - log_x) / (1.0 + 1.0 / w);
        w -= step;
        if (std::abs(step) <= 1e-16 * w) break;
    }
    return w;
}

double laguerre(int n, double a, double x) {
    if (n < 0) throw std::domain_error("laguerre: n < 0");
    return laguerre_t<double>(n, a, x);
}

double hyp2f1_terminating(double a, double b, double c, double z) {
    require_finite(a, "hyp2f1_terminating");
    require_finite(b, "hyp2f1_terminating");
    require_finite(c, "hyp2f1_terminating");
    require_finite(z, "hyp2f1_terminating");
    if (!is_nonpositive_integer(a)) throw std::domain_error("hyp2f1_terminating: a must be a non-positive integer");
    const int n = static_cast<int>(-a);

    std::vector<SignedLog> terms;
    terms.reserve(n + 1);
    SignedLog t{1, 0.0};
    terms.push_back(t);
    const SignedLog lz = signed_log(z);
    for (int k = 0; k < n; ++k) {
        const SignedLog num = signed_log(a + k) * signed_log(b + k);
        if (num.sign == 0 || lz.sign == 0) break;
        if (c + k == 0.0) throw std::domain_error("hyp2f1_terminating: vanishing denominator Pochhammer");
        t = t * num / (signed_log(c + k) * signed_log(k + 1.0)) * lz;
        terms.push_back(t);
    }

    double lmax = -kInf;
    for (const auto& term : terms) lmax = std::max(lmax, term.log_abs);
    double sum = 0.0;
    for (const auto& term : terms) sum += term.sign * std::exp(term.log_abs - lmax);
    return sum * std::exp(lmax);
}

double log_gamma_upper(double a, double x) {
    require_finite(a, "gamma_upper");
    require_finite(x, "gamma_upper");
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_upper: need a > 0, x >= 0");
    if (x == 0.0) return std::lgamma(a);

    const double log_prefactor = a * std::log(x) - x;
    constexpr double eps = 1e-16;
    if (x < a + 1.0) {
        // lower incomplete by series, then complement
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int it = 0; it < 10000; ++it) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * eps) break;
        }
        const double lower_reg = sum * std::exp(log_prefactor - std::lgamma(a));
        return std::lgamma(a) + std::log1p(-lower_reg);
    }

    // modified Lentz continued fraction
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return log_prefactor + std::log(h);
}

double gamma_upper(double a, double x) {
    if (x == 0.0 && a > 0.0 && std::isfinite(a)) return std::tgamma(a);
    return std::exp(log_gamma_upper(a, x));
}

double beta_incomplete(double x, double a, double b) {
    require_finite(x, "beta_incomplete");
    if (x < 0.0 || x > 1.0 || !(a > 0.0) || !(b > 0.0))
        throw std::domain_error("beta_incomplete: need x in [0,1], a > 0, b > 0");
    return boost::math::beta(a, b, x);
}

double log_factorial(std::int64_t n) {
    if (n < 0) throw std::domain_error("log_factorial: n < 0");
    static const std::array<double, 21> table = [] {
        std::array<double, 21> t{};
        std::uint64_t f = 1;
        for (int k = 0; k <= 20; ++k) {
            if (k > 0) f *= static_cast<std::uint64_t>(k);
            t[k] = std::log(static_cast<double>(f));
        }
        return t;
    }();
    if (n <= 20) return table[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

SignedLog pochhammer_log(double x, std::int64_t n) {
    require_finite(x, "pochhammer_log");
    if (n < 0) throw std::domain_error("pochhammer_log: n < 0");
    if (n == 0) return {1, 0.0};
    if (x == 1.0) return {1, log_factorial(n)};
    if (is_nonpositive_integer(x) && -x < static_cast<double>(n)) return {0, -kInf};

    if (n <= 256 || x <= 0.0) {
        int sign = 1;
        double acc = 0.0;
        std::int64_t i = 0;
        // direct product while factors may be negative or the count is small
        for (; i < n; ++i) {
            const double f = x + static_cast<double>(i);
            if (f > 0.0 && n - i > 256) break;
            if (f < 0.0) sign = -sign;
            acc += std::log(std::abs(f));
        }
        if (i < n) {
            const double y = x + static_cast<double>(i);
            acc += std::lgamma(y + static_cast<double>(n - i)) - std::lgamma(y);
        }
        return {sign, acc};
    }
    return {1, std::lgamma(x + static_cast<double>(n)) - std::lgamma(x)};
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -kInf;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace cvoodg::specfun
