#pragma once

#include <functional>

#include "odeim/rep.hpp"

namespace odeim {

// Piecewise path in the cut plane: straight segments and origin-centred arcs.
struct PathSegment {
    enum class Kind { Line, Arc } kind = Kind::Line;
    Complex a, b;        // Line: endpoints
    double radius = 0;   // Arc: |z| = radius, angle from theta0 to theta1
    double theta0 = 0, theta1 = 0;

    static PathSegment line(Complex a, Complex b) { return {Kind::Line, a, b, 0, 0, 0}; }
    static PathSegment arc(double r, double t0, double t1) {
        return {Kind::Arc, 0, 0, r, t0, t1};
    }

    Complex z(double t) const { // t in [0,1]
        if (kind == Kind::Line) return a + t * (b - a);
        return std::polar(radius, theta0 + t * (theta1 - theta0));
    }
    Complex dz(double t) const {
        if (kind == Kind::Line) return b - a;
        return Complex(0, 1) * (theta1 - theta0) * std::polar(radius, theta0 + t * (theta1 - theta0));
    }
};

// Radial-then-arc path from a point on the positive axis to any point of the
// cut plane.
inline std::vector<PathSegment> path_to(double x_start, const Complex& target) {
    std::vector<PathSegment> segs;
    const double r = std::abs(target);
    const double th = std::arg(target);
    if (std::abs(r - x_start) > 1e-14 * std::max(1.0, x_start))
        segs.push_back(PathSegment::line(x_start, r));
    if (std::abs(th) > 1e-15) segs.push_back(PathSegment::arc(r, 0.0, th));
    return segs;
}

struct IntegratorStats {
    long steps = 0;
    long rejected = 0;
    double min_step = 1e300;
};

// Adaptive Dormand-Prince 5(4) for y' = F(z) y along a complex path.
// Pure relative error control (solutions scale over hundreds of orders of
// magnitude, so an absolute floor would be meaningless).
class Rk45 {
public:
    double rtol = 1e-10;
    long max_steps = 4'000'000;
    // spectral-scale estimate of the coefficient field, for the stability cap
    std::function<double(const Complex&)> op_scale;

    template <class Field>
    CVector solve(const Field& F, const std::vector<PathSegment>& path, CVector y,
                  IntegratorStats* stats = nullptr) const {
        for (const auto& seg : path) y = solve_segment(F, seg, std::move(y), stats);
        return y;
    }

    template <class Field>
    CVector solve_segment(const Field& F, const PathSegment& seg, CVector y,
                          IntegratorStats* stats) const {
        // classic DP5(4) tableau
        static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static const double a21 = 1.0 / 5;
        static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
        static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

        auto rhs = [&](double t, const CVector& v) -> CVector {
            return seg.dz(t) * (F(seg.z(t)) * v);
        };
        // explicit-RK stability cap: h * (spectral scale of dz A) must stay
        // inside the DP5 stability region even when the error estimate is
        // dominated by an exponentially growing mode
        auto opnorm = [&](double t) -> double {
            if (op_scale) return std::abs(seg.dz(t)) * op_scale(seg.z(t));
            return std::abs(seg.dz(t)) * F(seg.z(t)).cwiseAbs().rowwise().sum().maxCoeff();
        };

        double t = 0;
        double h = 1e-4;
        CVector k1 = rhs(t, y);
        long guard = 0;
        while (t < 1.0) {
            if (++guard > max_steps) throw std::runtime_error("Rk45: step budget exhausted");
            h = std::min(h, 1.0 - t);
            const double cap = 1.6 / std::max(opnorm(t), 1e-300);
            h = std::min(h, cap);
            CVector k2 = rhs(t + c2 * h, y + h * (a21 * k1));
            CVector k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            CVector k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            CVector k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            CVector k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            CVector ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            CVector k7 = rhs(t + h, ynew);
            CVector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double scale = std::max(y.norm(), ynew.norm());
            const double enorm = scale > 0 ? err.norm() / (rtol * scale) : 0.0;
            if (enorm <= 1.0) {
                t += h;
                y = std::move(ynew);
                k1 = std::move(k7); // FSAL
                if (stats) {
                    ++stats->steps;
                    stats->min_step = std::min(stats->min_step, h);
                }
            } else if (stats) {
                ++stats->rejected;
            }
            const double fac = enorm > 0 ? 0.9 * std::pow(enorm, -0.2) : 5.0;
            h = std::min(h * std::clamp(fac, 0.2, 5.0), cap);
            if (h < 1e-14) throw std::runtime_error("Rk45: step size collapse");
        }
        return y;
    }
};

} // namespace odeim
