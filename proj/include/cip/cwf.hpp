#pragma once

#include <cmath>
#include <string>

#include "cip/errors.hpp"
#include "cip/laplace.hpp"

namespace cip {

/// Per-interval constants of the Carleman-weighted q-equation.  With the
/// weight exp[lambda (s - s_{n-1})] on (s_n, s_{n-1}) and the substitution
/// t = s_{n-1} - s, everything reduces to the exponential moments
/// M_k = int_0^h t^k e^{-lambda t} dt and I_0 = M_0:
///
///   A2 = <2s>                    = 2 (s_{n-1} - M1/I0)
///   A1 = <6s^2 - 4 s s_{n-1}>    = 2 s_{n-1}^2 - 8 s_{n-1} M1/I0 + 6 M2/I0
///   I1/I0 = <s (s_{n-1}-s)(s_{n-1}-2s)>
///         = 3 s_{n-1} M2/I0 - s_{n-1}^2 M1/I0 - 2 M3/I0
///
/// where <.> is the weighted interval average.  A1 multiplies the drift
/// couplings of grad q_n, A2 the source terms, and 2 I1/I0 the dropped
/// nonlinear (grad q_n)^2 term.  As lambda -> inf the weight concentrates
/// at s_{n-1}: A1 -> 2 s_{n-1}^2, A2 -> 2 s_{n-1}, I1/I0 -> 0.
struct CwfCoeffs {
    int n = 1;
    double A1 = 0.0;
    double A2 = 0.0;
    double I1_over_I0 = 0.0;
    double lambda = 0.0;
    double h = 0.0;
};

namespace detail {

struct ExpMoments {
    double M0, M1, M2, M3;
};

/// Closed forms of int_0^h t^k e^{-lambda t} dt, k = 0..3.
inline ExpMoments exp_moments(double lambda, double h) {
    const double x = lambda * h;
    const double E = std::exp(-x);
    ExpMoments m;
    m.M0 = (1.0 - E) / lambda;
    m.M1 = (1.0 - (1.0 + x) * E) / (lambda * lambda);
    m.M2 = (2.0 - (2.0 + 2.0 * x + x * x) * E) / (lambda * lambda * lambda);
    m.M3 = (6.0 - (6.0 + 6.0 * x + 3.0 * x * x + x * x * x) * E) /
           (lambda * lambda * lambda * lambda);
    return m;
}

} // namespace detail

inline CwfCoeffs compute_cwf(int n, const PseudoFreqGrid& sg, double lambda) {
    if (n < 1 || n > sg.N) throw config_error("compute_cwf: interval index out of range");
    if (lambda * sg.h < 1.0)
        throw config_error("compute_cwf: lambda*h = " + std::to_string(lambda * sg.h) +
                           " < 1, the coefficient bounds are unavailable");
    const double sp = sg.s(n - 1); // s_{n-1}
    const auto m = detail::exp_moments(lambda, sg.h);
    const double m1 = m.M1 / m.M0, m2 = m.M2 / m.M0, m3 = m.M3 / m.M0;
    CwfCoeffs c;
    c.n = n;
    c.lambda = lambda;
    c.h = sg.h;
    c.A2 = 2.0 * (sp - m1);
    c.A1 = 2.0 * sp * sp - 8.0 * sp * m1 + 6.0 * m2;
    c.I1_over_I0 = 3.0 * sp * m2 - sp * sp * m1 - 2.0 * m3;
    return c;
}

/// Independent evaluation of the same coefficients by composite-Simpson
/// quadrature of the raw weighted integrals; test oracle only.
inline CwfCoeffs compute_cwf_quadrature(int n, const PseudoFreqGrid& sg, double lambda,
                                        int panels = 4096) {
    if (n < 1 || n > sg.N) throw config_error("compute_cwf_quadrature: bad interval");
    const double sp = sg.s(n - 1), sn = sg.s(n);
    auto integrate = [&](auto f) {
        const double dx = (sp - sn) / panels;
        double acc = 0.0;
        for (int i = 0; i < panels; ++i) {
            const double a = sn + i * dx, b = a + dx, mid = 0.5 * (a + b);
            acc += dx / 6.0 * (f(a) + 4.0 * f(mid) + f(b));
        }
        return acc;
    };
    auto K = [&](double s) { return std::exp(lambda * (s - sp)); };
    const double I0 = integrate(K);
    CwfCoeffs c;
    c.n = n;
    c.lambda = lambda;
    c.h = sg.h;
    c.A2 = integrate([&](double s) { return 2.0 * s * K(s); }) / I0;
    c.A1 = integrate([&](double s) { return (6.0 * s * s - 4.0 * s * sp) * K(s); }) / I0;
    c.I1_over_I0 =
        integrate([&](double s) { return s * (sp - s) * (sp - 2.0 * s) * K(s); }) / I0;
    return c;
}

} // namespace cip
