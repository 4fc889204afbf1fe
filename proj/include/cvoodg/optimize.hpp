#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace cvoodg::opt {

struct Argmin {
    double x = 0.0;
    double f = 0.0;
};

// Minimise f over [lo, hi] (lo > 0): evaluate `seeds` log-spaced points, then
// golden-section search in log x around the best seed. The result is never
// worse than any point evaluated; ties go to the smaller x.
inline Argmin golden_log(const std::function<double(double)>& f, double lo, double hi, int seeds = 20,
                         int iters = 60) {
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    std::vector<double> xs(seeds), fs(seeds);
    Argmin best{lo, f(lo)};
    for (int i = 0; i < seeds; ++i) {
        xs[i] = (i == 0) ? lo : (i == seeds - 1) ? hi : std::exp(llo + (lhi - llo) * i / (seeds - 1));
        fs[i] = (i == 0) ? best.f : f(xs[i]);
        if (fs[i] < best.f) best = {xs[i], fs[i]};
    }
    int ib = 0;
    for (int i = 1; i < seeds; ++i)
        if (fs[i] < fs[ib]) ib = i;
    double a = std::log(xs[ib > 0 ? ib - 1 : 0]);
    double b = std::log(xs[ib < seeds - 1 ? ib + 1 : seeds - 1]);

    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(std::exp(c));
    double fd = f(std::exp(d));
    auto consider = [&](double lx, double fx) {
        const double x = std::exp(lx);
        if (fx < best.f || (fx == best.f && x < best.x)) best = {x, fx};
    };
    consider(c, fc);
    consider(d, fd);
    for (int it = 0; it < iters && b - a > 1e-10; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(std::exp(c));
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(std::exp(d));
            consider(d, fd);
        }
    }
    return best;
}

}  // namespace cvoodg::opt
