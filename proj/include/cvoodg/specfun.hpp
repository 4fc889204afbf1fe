#pragma once

#include <cstdint>

namespace cvoodg::specfun {

// Value stored as sign * exp(log_abs). sign is -1, 0 or +1; a zero value
// carries log_abs = -inf.
struct SignedLog {
    int sign = 1;
    double log_abs = 0.0;

    double value() const;
};

SignedLog operator*(SignedLog a, SignedLog b);
SignedLog operator/(SignedLog a, SignedLog b);
SignedLog signed_log(double x);

// Principal branch. Throws std::domain_error for x < -1/e or non-finite x.
double lambert_w0(double x);
// W0(exp(log_x)), usable where exp(log_x) would overflow.
double lambert_w0_exp(double log_x);

// Generalised Laguerre polynomial L_n^a(x).
template <class Real>
Real laguerre_t(int n, Real a, Real x) {
    if (n <= 0) return Real(1);
    Real prev = 1;
    Real cur = 1 + a - x;
    for (int k = 1; k < n; ++k) {
        const Real next = ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

double laguerre(int n, double a, double x);

// 2F1(a, b; c; z) for a in {0, -1, -2, ...}.
double hyp2f1_terminating(double a, double b, double c, double z);

// Gamma[a, x] = int_x^inf t^(a-1) e^-t dt.
double gamma_upper(double a, double x);
double log_gamma_upper(double a, double x);

// Unregularised beta[x; a, b] = int_0^x t^(a-1) (1-t)^(b-1) dt.
double beta_incomplete(double x, double a, double b);

double log_factorial(std::int64_t n);
SignedLog pochhammer_log(double x, std::int64_t n);

// log C(n, k)
double log_binomial(std::int64_t n, std::int64_t k);

// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

}  // namespace cvoodg::specfun
