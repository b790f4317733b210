#pragma once

#include "odeim/integrator.hpp"
#include "odeim/spectra.hpp"
#include "odeim/wkb.hpp"

namespace odeim {

// Everything needed to evaluate the subdominant solution of
//   Psi' + (ell/x + e + p(x,E) e_0) Psi = 0,   p = x^{M h^vee} - E,
// in one representation: the Lambda eigenbasis, the normalized maximal
// eigenvector, and the WKB truncation data.
struct ConnectionContext {
    AlgebraData alg;
    MatrixRep rep;
    Rational M;
    std::vector<Complex> ell;   // coefficients of h_1..h_n
    CVector psi;                // normalized maximal eigenvector of Lambda
    double lambda = 0;
    WkbData wkb;
    Eigenbasis eig;             // of Lambda in rep
    int lambda_col = -1;        // column of psi in eig
    CMatrix W0;                 // Qinv (ell - M h) Q
    CMatrix Hbar;               // Qinv h Q
    CMatrix ell_mat, e_sum;     // cached pieces of the coefficient field
    double w0_diag = 0;         // |(W0)_{lambda lambda}|, must vanish

    double rtol = 1e-10;
    double x1_user = 0;         // 0 = automatic
    int max_orders = 800;       // tau-series budget

    double Mh() const { return M.to_double() * static_cast<double>(alg.h_vee()); }
};

inline ConnectionContext make_context(const AlgebraData& alg, MatrixRep rep, const Rational& M,
                                      const std::vector<Complex>& ell, CVector psi_normalized,
                                      double lambda) {
    ConnectionContext cx;
    cx.alg = alg;
    cx.rep = std::move(rep);
    cx.M = M;
    cx.ell = ell;
    cx.psi = std::move(psi_normalized);
    cx.lambda = lambda;
    cx.wkb = WkbData::make(M.to_double(), alg.h_vee());
    cx.eig = semisimple_eigenbasis(cx.rep.Lambda());

    // locate the maximal eigenvalue column and pin its eigenvector to psi
    int best = -1;
    double bd = 1e300;
    for (int c = 0; c < cx.rep.dim; ++c) {
        const double d = std::abs(cx.eig.values[c] - lambda);
        if (d < bd) { bd = d; best = c; }
    }
    if (best < 0 || bd > 1e-6) throw std::invalid_argument("make_context: lambda not in the spectrum");
    cx.lambda_col = best;
    cx.eig.Q.col(best) = cx.psi;
    cx.eig.Qinv = cx.eig.Q.fullPivLu().inverse();

    CMatrix ellM = cx.rep.ell_matrix(ell);
    const double Md = M.to_double();
    cx.ell_mat = ellM;
    cx.e_sum = CMatrix::Zero(cx.rep.dim, cx.rep.dim);
    for (int i = 1; i <= alg.rank(); ++i) cx.e_sum += cx.rep.e[i];
    cx.W0 = cx.eig.Qinv * (ellM - Md * cx.rep.grading) * cx.eig.Q;
    cx.Hbar = cx.eig.Qinv * cx.rep.grading * cx.eig.Q;
    cx.w0_diag = std::abs(cx.W0(best, best));
    if (cx.w0_diag > 1e-8)
        throw std::runtime_error("make_context: (ell - Mh) has a diagonal part on the subdominant mode");
    return cx;
}

// Coefficient field of the connection at a point of the cut plane.
inline CMatrix connection_field(const ConnectionContext& cx, const Complex& E, const Complex& x) {
    const Complex p = std::pow(x, cx.Mh()) - E;
    return -(cx.ell_mat / x) - cx.e_sum - p * cx.rep.e[0];
}

struct SeriesInit {
    CVector value;      // Psi(x1)
    double x1 = 0;
    int orders = 0;     // tau orders used
    double tail = 0;    // relative size of the last retained term
};

// Asymptotic-series initial value at x1 on the positive axis, normalized so
// that Psi ~ e^{-lambda S(x,E)} q^{-h}(psi + o(1)) exactly in the large-x
// limit. The series runs in tau = x^{-1/b} (M = a/b) in the Lambda
// eigenbasis after factoring the exact p^{1/h^vee} exponent.
inline SeriesInit series_initial_value(const ConnectionContext& cx, const Complex& E, double x1) {
    const int dim = cx.rep.dim;
    const std::int64_t a = cx.M.num(), b = cx.M.den();
    const std::int64_t K = a * cx.alg.h_vee(); // M h^vee in tau units
    const int L = cx.lambda_col;
    const double Md = cx.M.to_double();

    const double tau = std::pow(x1, -1.0 / static_cast<double>(b));
    if (std::abs(E) * std::pow(x1, -cx.Mh()) > 0.6)
        throw std::invalid_argument("series_initial_value: x1 below the series radius");

    // g-series and W-series coefficients on the tau^K lattice
    const int mmax = cx.max_orders / static_cast<int>(K) + 2;
    std::vector<Complex> gm(mmax + 1);
    for (int m = 0; m <= mmax; ++m)
        gm[m] = generalized_binomial(1.0 / static_cast<double>(cx.alg.h_vee()), m) * std::pow(-E, m);

    std::vector<CVector> z;
    z.push_back(CVector::Zero(dim));
    z[0][L] = 1.0;

    CVector sum = z[0];
    double last_rel = 1.0;
    int used = 0;
    double prev_term = 1e300;
    for (int nu = 1; nu <= cx.max_orders; ++nu) {
        CVector R = CVector::Zero(dim);
        const std::int64_t kd = nu - a - b;
        if (kd >= 0) R += (static_cast<double>(kd) / b) * z[kd];
        for (std::int64_t m = 1; m * K <= nu; ++m) {
            const std::int64_t idx = nu - m * K;
            CVector t = z[idx];
            for (int c = 0; c < dim; ++c) t[c] *= (cx.eig.values[c] - cx.lambda);
            R -= gm[m] * t;
        }
        for (std::int64_t m = 0; kd - m * K >= 0; ++m) {
            const CVector& zz = z[kd - m * K];
            if (m == 0)
                R -= cx.W0 * zz;
            else
                R -= (-Md * std::pow(E, static_cast<double>(m))) * (cx.Hbar * zz);
        }
        CVector znu = CVector::Zero(dim);
        for (int c = 0; c < dim; ++c) {
            if (c == L) continue;
            znu[c] = R[c] / (cx.eig.values[c] - cx.lambda);
        }
        // lambda component from the next-order consistency relation
        Complex zl = 0;
        for (std::int64_t m = 0; nu - m * K >= 0; ++m) {
            const CVector& zz = (m == 0) ? znu : z[nu - m * K];
            Complex row = 0;
            if (m == 0)
                row = (cx.W0.row(L) * zz).value();
            else
                row = ((-Md * std::pow(E, static_cast<double>(m))) * (cx.Hbar.row(L) * zz)).value();
            zl += row;
        }
        znu[L] = (static_cast<double>(b) / nu) * zl;
        z.push_back(znu);

        const double term = znu.norm() * std::pow(tau, nu);
        if (term > 4 * prev_term && prev_term > 0 && nu > 6 * (a + b)) {
            // asymptotic tail turned around: stop at the optimal truncation
            last_rel = prev_term / std::max(sum.norm(), 1e-300);
            used = nu - 1;
            break;
        }
        sum += znu * std::pow(tau, nu);
        used = nu;
        if (term > 0) {
            // ignore structural zeros of the exponent lattice
            last_rel = term / std::max(sum.norm(), 1e-300);
            prev_term = term;
            if (last_rel < 3e-15 && nu > a + b) break;
        }
    }

    // assemble Psi(x1) = e^{-lambda (S - T)} g^{-h} Q Z
    const Complex S = wkb_action(cx.wkb, x1, E);
    const Complex T = wkb_tail(cx.wkb, x1, E);
    const Complex expo = -cx.lambda * (S - T);
    if (expo.real() < -690.0)
        throw std::runtime_error("series_initial_value: e^{-lambda S} underflows; reduce x1");
    const Complex pref = std::exp(expo);
    const Complex g = std::pow(std::pow(Complex(x1, 0), cx.Mh()) - E, 1.0 / static_cast<double>(cx.alg.h_vee()));

    CVector phi = cx.eig.Q * sum;
    SeriesInit out;
    out.value.resize(dim);
    for (int j = 0; j < dim; ++j)
        out.value[j] = pref * std::pow(g, -cx.rep.grading_wt[j].to_double()) * phi[j];
    out.x1 = x1;
    out.orders = used;
    out.tail = last_rel;
    return out;
}

// Pick x1: inside the series radius, far enough out for accuracy, but with
// e^{-lambda S(x1)} still representable.
inline double x1_cap(const ConnectionContext& cx) {
    const double Md = cx.M.to_double();
    return std::pow(620.0 * (Md + 1.0) / std::max(cx.lambda, 0.1), 1.0 / (Md + 1.0));
}

inline double choose_x1(const ConnectionContext& cx, const Complex& E) {
    if (cx.x1_user > 0) return cx.x1_user;
    double x1 = std::max(6.0, 1.8 * std::pow(std::abs(E) + 1.0, 1.0 / cx.Mh()));
    return std::min(x1, x1_cap(cx));
}

struct SolveDiagnostics {
    IntegratorStats stats;
    SeriesInit init;
};

// The Thm-3.3-normalized subdominant solution evaluated at x_eval (a point
// of the cut plane), integrating along ray + arc from x1.
inline CVector subdominant_at(const ConnectionContext& cx, const Complex& E, const Complex& x_eval,
                              SolveDiagnostics* diag = nullptr) {
    double x1 = choose_x1(cx, E);
    if (std::abs(x_eval) > x1) x1 = std::abs(x_eval) * 1.0000001;
    const double cap = x1_cap(cx);
    SeriesInit init;
    for (int attempt = 0;; ++attempt) {
        init = series_initial_value(cx, E, x1);
        if (init.tail < 1e-11 || attempt >= 4) break;
        if (x1 >= cap * 0.999) break;
        x1 = std::min(x1 * 1.3, cap);
    }
    if (init.tail > 1e-9)
        throw std::runtime_error("subdominant_at: asymptotic series too short (tail " +
                                 std::to_string(init.tail) + ")");
    Rk45 rk;
    rk.rtol = cx.rtol;
    // eigenvalues of the field scale like |p|^{1/h^vee} lambda + |ell|/|x|
    double ell_scale = 0;
    for (const auto& c : cx.ell) ell_scale += std::abs(c);
    rk.op_scale = [&cx, &E, ell_scale](const Complex& zz) {
        const double q = std::pow(std::abs(std::pow(zz, cx.Mh()) - E), 1.0 / cx.alg.h_vee());
        return 2.0 * (q * std::max(cx.lambda, 0.5) + (3.0 * ell_scale + 1.0) / std::abs(zz));
    };
    IntegratorStats st;
    auto field = [&](const Complex& zz) { return connection_field(cx, E, zz); };
    CVector y = rk.solve(field, path_to(x1, x_eval), init.value, &st);
    if (diag) {
        diag->stats = st;
        diag->init = init;
    }
    return y;
}

// Rotated solution Psi_k(x,E) = omega^{-k h} Psi(omega^k x, Omega^k E).
inline CVector rotated_solution(const ConnectionContext& cx, double k, const Complex& x,
                                const Complex& E, SolveDiagnostics* diag = nullptr) {
    const double Md = cx.M.to_double();
    const double bound = cx.alg.h_vee() * (Md + 1.0) / 2.0;
    if (std::abs(k) >= bound)
        throw std::invalid_argument("rotated_solution: |k| out of the validity range");
    // natural-phase powers: Omega's angle exceeds pi for M > 1
    const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi / (cx.alg.h_vee() * (Md + 1.0)));
    const Complex xr = std::exp(Complex(0, 1) * (2.0 * std::numbers::pi * k / (cx.alg.h_vee() * (Md + 1.0)))) * x;
    if (std::abs(std::arg(xr)) >= std::numbers::pi - 1e-9)
        throw std::invalid_argument("rotated_solution: continuation path hits the cut");
    const Complex Er = std::exp(Complex(0, 1) * (2.0 * std::numbers::pi * Md * k / (Md + 1.0))) * E;
    CVector v = subdominant_at(cx, Er, xr, diag);
    return rotate_vector(cx.rep, k, omega, v);
}

// Midpoint residual || Psi' + (ell/x + e + p e_0) Psi || / || Psi || via a
// five-point derivative stencil on a short arc of the path.
inline double ode_residual(const ConnectionContext& cx, const Complex& E, const Complex& x,
                           double step = 1e-4) {
    auto val = [&](double t) { return subdominant_at(cx, E, x + t * step * std::abs(x)); };
    const double hh = step * std::abs(x);
    CVector d = (val(-2) - 8.0 * val(-1) + 8.0 * val(1) - val(2)) / (12.0 * hh);
    CVector mid = subdominant_at(cx, E, x);
    CVector resid = d - connection_field(cx, E, x) * mid;
    return resid.norm() / std::max(mid.norm(), 1e-300);
}

} // namespace odeim
