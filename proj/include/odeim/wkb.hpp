#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "odeim/algebra.hpp"

namespace odeim {

// binom(alpha, j) for real alpha
inline double generalized_binomial(double alpha, int j) {
    double out = 1.0;
    for (int k = 0; k < j; ++k) out *= (alpha - k) / (k + 1);
    return out;
}

// Truncation data for q(x,E) = x^M + sum_{j=1}^s c_j(E) x^{M(1-h^vee j)}:
// s = floor((M+1)/(h^vee M)), delta = M(h^vee(1+s)-1)-1 > 0, and
// c_j(E) = binom(1/h^vee, j)(-E)^j.
struct WkbData {
    double M = 1;
    std::int64_t h_vee = 2;
    int s = 0;
    double delta = 0;
    bool log_case = false; // (M+1)/(h^vee M) integer: c_s picks up log x

    static WkbData make(double M, std::int64_t h_vee) {
        WkbData w;
        w.M = M;
        w.h_vee = h_vee;
        const double ratio = (M + 1.0) / (static_cast<double>(h_vee) * M);
        w.s = static_cast<int>(std::floor(ratio + 1e-12));
        w.log_case = std::abs(ratio - std::round(ratio)) < 1e-12;
        if (w.log_case) w.s = static_cast<int>(std::round(ratio));
        w.delta = M * (static_cast<double>(h_vee) * (1 + w.s) - 1) - 1;
        return w;
    }

    Complex c_j(int j, const Complex& E) const {
        return generalized_binomial(1.0 / static_cast<double>(h_vee), j) * std::pow(-E, j);
    }
};

// q(x,E) with the principal branch (q ~ |x|^M on the positive axis).
inline Complex wkb_q(const WkbData& w, const Complex& x, const Complex& E) {
    Complex out = std::pow(x, w.M);
    for (int j = 1; j <= w.s; ++j) out += w.c_j(j, E) * std::pow(x, w.M * (1.0 - w.h_vee * j));
    return out;
}

// S(x,E) = int_0^x q: termwise primitive; in the log case the last term is
// c_s(E) log x.
inline Complex wkb_action(const WkbData& w, const Complex& x, const Complex& E) {
    if (x.real() <= 0 && std::abs(x.imag()) < 1e-300)
        throw std::invalid_argument("wkb_action: x on the cut");
    Complex out = std::pow(x, w.M + 1.0) / (w.M + 1.0);
    const int jmax = w.log_case ? w.s - 1 : w.s;
    for (int j = 1; j <= jmax; ++j) {
        const double p = w.M * (1.0 - w.h_vee * j);
        out += w.c_j(j, E) * std::pow(x, p + 1.0) / (p + 1.0);
    }
    if (w.log_case) out += w.c_j(w.s, E) * std::log(x);
    return out;
}

// T(x,E) = int_x^infty (p^{1/h^vee} - q) dy, the convergent tail that links
// the truncated action to the exact exponent. Requires |E| < |x|^{M h^vee}.
inline Complex wkb_tail(const WkbData& w, const Complex& x, const Complex& E) {
    Complex out = 0;
    const Complex ratio = E * std::pow(x, -w.M * static_cast<double>(w.h_vee));
    if (std::abs(ratio) >= 0.75)
        throw std::invalid_argument("wkb_tail: x too small for the tail series");
    for (int j = w.s + 1; j < w.s + 200; ++j) {
        const double p = w.M * (1.0 - w.h_vee * j);
        const Complex term = -w.c_j(j, E) * std::pow(x, p + 1.0) / (p + 1.0);
        out += term;
        if (std::abs(term) < 1e-22 * (1.0 + std::abs(out))) break;
    }
    return out;
}

} // namespace odeim
