#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "odeim/algebra.hpp"

namespace odeim {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline Complex unit_phase(const Rational& k) {
    return std::polar(1.0, 2.0 * std::numbers::pi * k.to_double());
}

// A finite dimensional evaluation representation of ^L g^(1), stored as
// dense complex generator matrices plus weight bookkeeping. The h-matrices
// are diagonal in the stored basis; grading is the element h of
// [h,e_i]=e_i, [h,e_0]=-(h^vee-1)e_0, normalized traceless.
struct MatrixRep {
    AlgebraData alg;
    int dim = 0;
    std::vector<CMatrix> e, f, h; // index 0..n
    CMatrix grading;
    std::vector<Rational> grading_wt;                  // per basis vector
    std::vector<std::vector<std::int64_t>> weights;    // per basis vector: h_1..h_n eigenvalues
    Rational eval_k;
    std::string label;
    bool spin_surrogate = false;
    std::vector<std::vector<int>> basis_tuples;        // wedge reps: parent index tuples

    int n() const { return alg.rank(); }

    CMatrix Lambda() const {
        CMatrix L = e[0];
        for (size_t i = 1; i < e.size(); ++i) L += e[i];
        return L;
    }

    CMatrix ell_matrix(const std::vector<Complex>& ell) const {
        if (static_cast<int>(ell.size()) != n()) throw std::invalid_argument("ell size != rank");
        CMatrix L = CMatrix::Zero(dim, dim);
        for (int i = 0; i < n(); ++i) L += ell[i] * h[i + 1];
        return L;
    }

    // Index of the highest-weight basis vector (maximal grading eigenvalue).
    int highest_weight_index() const {
        int best = 0;
        for (int b = 1; b < dim; ++b)
            if (grading_wt[best] < grading_wt[b]) best = b;
        for (int b = 0; b < dim; ++b)
            if (b != best && grading_wt[b] == grading_wt[best])
                throw std::logic_error("highest weight not unique in " + label);
        return best;
    }

    // Basis indices carrying a given h-weight tuple.
    std::vector<int> weight_indices(const std::vector<std::int64_t>& w) const {
        std::vector<int> out;
        for (int b = 0; b < dim; ++b)
            if (weights[b] == w) out.push_back(b);
        return out;
    }
};

namespace detail {

inline CMatrix elem(int dim, int i, int j) { // 1-based E_ij
    CMatrix m = CMatrix::Zero(dim, dim);
    m(i - 1, j - 1) = 1.0;
    return m;
}

inline void extract_weights(MatrixRep& rep) {
    const double tol = 1e-9;
    rep.weights.assign(rep.dim, std::vector<std::int64_t>(rep.n(), 0));
    for (int i = 1; i <= rep.n(); ++i) {
        const CMatrix& H = rep.h[i];
        for (int a = 0; a < rep.dim; ++a)
            for (int b = 0; b < rep.dim; ++b)
                if (a != b && std::abs(H(a, b)) > tol)
                    throw std::logic_error("h matrix not diagonal in " + rep.label);
        for (int b = 0; b < rep.dim; ++b) {
            double v = H(b, b).real();
            if (std::abs(H(b, b).imag()) > tol || std::abs(v - std::llround(v)) > tol)
                throw std::logic_error("h eigenvalue not integral in " + rep.label);
            rep.weights[b][i - 1] = std::llround(v);
        }
    }
}

// Solve [h, e_i] = deg_i e_i over diagonal matrices by propagating
// x_row = x_col + deg_i along every nonzero entry of every e_i, then center
// to zero trace. deg = 1 for i in I and -(h^vee - 1) for e_0.
inline void compute_grading(MatrixRep& rep) {
    const std::int64_t hv = rep.alg.h_vee();
    std::vector<std::optional<std::int64_t>> x(rep.dim);
    x[0] = 0;
    bool progress = true;
    const double tol = 1e-12;
    while (progress) {
        progress = false;
        for (size_t g = 0; g < rep.e.size(); ++g) {
            const std::int64_t deg = g == 0 ? -(hv - 1) : 1;
            const CMatrix& E = rep.e[g];
            for (int a = 0; a < rep.dim; ++a)
                for (int b = 0; b < rep.dim; ++b) {
                    if (std::abs(E(a, b)) < tol) continue;
                    if (x[b] && !x[a]) { x[a] = *x[b] + deg; progress = true; }
                    else if (x[a] && !x[b]) { x[b] = *x[a] - deg; progress = true; }
                    else if (x[a] && x[b] && *x[a] != *x[b] + deg)
                        throw std::logic_error("grading inconsistent in " + rep.label);
                }
        }
    }
    std::int64_t sum = 0;
    for (int b = 0; b < rep.dim; ++b) {
        if (!x[b]) throw std::logic_error("grading underdetermined in " + rep.label);
        sum += *x[b];
    }
    rep.grading_wt.assign(rep.dim, Rational(0));
    rep.grading = CMatrix::Zero(rep.dim, rep.dim);
    for (int b = 0; b < rep.dim; ++b) {
        rep.grading_wt[b] = Rational(*x[b]) - Rational(sum, rep.dim);
        rep.grading(b, b) = rep.grading_wt[b].to_double();
    }
}

inline void finalize(MatrixRep& rep) {
    extract_weights(rep);
    compute_grading(rep);
}

} // namespace detail

// --- standard representations -------------------------------------------

// A_{2n-1}^(2) on C^{2n} (the algebra attached to g = B_n).
inline MatrixRep standard_rep_A2odd(const AlgebraData& alg, const Rational& eval_k) {
    if (alg.g.family != Family::B) throw std::invalid_argument("standard_rep_A2odd: need B_n");
    const int n = alg.rank();
    if (n < 3) throw std::invalid_argument("standard_rep_A2odd: n >= 3 required");
    const int dim = 2 * n;
    using detail::elem;

    MatrixRep rep;
    rep.alg = alg;
    rep.dim = dim;
    rep.eval_k = eval_k;
    rep.label = "A" + std::to_string(2 * n - 1) + "(2) std";
    rep.e.assign(n + 1, CMatrix::Zero(dim, dim));
    rep.f.assign(n + 1, CMatrix::Zero(dim, dim));
    rep.h.assign(n + 1, CMatrix::Zero(dim, dim));

    auto te = [&](int i) -> CMatrix { return elem(dim, i, i + 1); };
    auto tf = [&](int i) -> CMatrix { return elem(dim, i + 1, i); };
    auto th = [&](int i) -> CMatrix { return elem(dim, i, i) - elem(dim, i + 1, i + 1); };

    for (int i = 1; i <= n - 1; ++i) {
        rep.e[i] = te(i) + te(2 * n - i);
        rep.f[i] = tf(i) + tf(2 * n - i);
        rep.h[i] = th(i) + th(2 * n - i);
    }
    rep.e[n] = te(n);
    rep.f[n] = tf(n);
    rep.h[n] = th(n);

    const Complex ph = unit_phase(eval_k);
    rep.e[0] = 0.5 * (elem(dim, 2 * n - 1, 1) + elem(dim, 2 * n, 2)) * ph;
    rep.f[0] = 2.0 * (elem(dim, 1, 2 * n - 1) + elem(dim, 2, 2 * n)) / ph;
    rep.h[0] = elem(dim, 2 * n - 1, 2 * n - 1) + elem(dim, 2 * n, 2 * n) - elem(dim, 1, 1) - elem(dim, 2, 2);

    detail::finalize(rep);
    return rep;
}

namespace detail {

// F/G matrices of the o_{2n+2} realization, i' = 2n+3-i.
inline CMatrix Fmat(int dim, int i, int j) {
    CMatrix m = elem(dim, i, j);
    m += (((i + j) % 2 == 0) ? -1.0 : 1.0) * elem(dim, dim + 1 - j, dim + 1 - i);
    return m;
}
inline CMatrix Gmat(int dim, int i, int j) {
    CMatrix m = elem(dim, i, j);
    m += (((i + j) % 2 == 0) ? 1.0 : -1.0) * elem(dim, dim + 1 - j, dim + 1 - i);
    return m;
}

} // namespace detail

// D_{n+1}^(2) on C^{2n+2} (the algebra attached to g = C_n).
inline MatrixRep standard_rep_D2(const AlgebraData& alg, const Rational& eval_k) {
    if (alg.g.family != Family::C) throw std::invalid_argument("standard_rep_D2: need C_n");
    const int n = alg.rank();
    if (n < 2) throw std::invalid_argument("standard_rep_D2: n >= 2 required");
    const int dim = 2 * n + 2;
    using detail::elem;
    using detail::Fmat;
    using detail::Gmat;

    MatrixRep rep;
    rep.alg = alg;
    rep.dim = dim;
    rep.eval_k = eval_k;
    rep.label = "D" + std::to_string(n + 1) + "(2) std";
    rep.e.assign(n + 1, CMatrix::Zero(dim, dim));
    rep.f.assign(n + 1, CMatrix::Zero(dim, dim));
    rep.h.assign(n + 1, CMatrix::Zero(dim, dim));

    std::vector<CMatrix> te(n + 2), tf(n + 2), th(n + 2); // tilde generators, 1..n+1
    for (int i = 1; i <= n; ++i) {
        te[i] = Fmat(dim, i, i + 1);
        tf[i] = Fmat(dim, i + 1, i);
        th[i] = Fmat(dim, i, i) - Fmat(dim, i + 1, i + 1);
    }
    te[n + 1] = 0.5 * Gmat(dim, n, n + 2);
    tf[n + 1] = 2.0 * Gmat(dim, n + 2, n);
    th[n + 1] = Fmat(dim, n, n) + Fmat(dim, n + 1, n + 1);

    for (int i = 1; i <= n - 1; ++i) { rep.e[i] = te[i]; rep.f[i] = tf[i]; rep.h[i] = th[i]; }
    rep.e[n] = te[n] + te[n + 1];
    rep.f[n] = tf[n] + tf[n + 1];
    rep.h[n] = th[n] + th[n + 1];

    const Complex eps = (n % 2 == 0) ? Complex(1, 0) : Complex(0, 1);
    const Complex ph = unit_phase(eval_k);
    rep.e[0] = (eps / 2.0) * (Fmat(dim, n + 1, 1) - 2.0 * Gmat(dim, n + 2, 1)) * ph;
    rep.f[0] = (1.0 / eps) * (2.0 * Fmat(dim, 1, n + 1) - Gmat(dim, 1, n + 2)) / ph;
    rep.h[0] = -2.0 * Fmat(dim, 1, 1);

    detail::finalize(rep);
    return rep;
}

// D_4^(3) on C^8 (the algebra attached to g = G_2).
inline MatrixRep standard_rep_D43(const AlgebraData& alg, const Rational& eval_k) {
    if (alg.g.family != Family::G) throw std::invalid_argument("standard_rep_D43: need G_2");
    const int dim = 8;
    using detail::Fmat;
    using detail::Gmat;

    MatrixRep rep;
    rep.alg = alg;
    rep.dim = dim;
    rep.eval_k = eval_k;
    rep.label = "D4(3) std";
    rep.e.assign(3, CMatrix::Zero(dim, dim));
    rep.f.assign(3, CMatrix::Zero(dim, dim));
    rep.h.assign(3, CMatrix::Zero(dim, dim));

    std::vector<CMatrix> te(5), tf(5), th(5);
    for (int i = 1; i <= 3; ++i) {
        te[i] = Fmat(dim, i, i + 1);
        tf[i] = Fmat(dim, i + 1, i);
        th[i] = Fmat(dim, i, i) - Fmat(dim, i + 1, i + 1);
    }
    te[4] = 0.5 * Gmat(dim, 3, 5);
    tf[4] = 2.0 * Gmat(dim, 5, 3);
    th[4] = Fmat(dim, 3, 3) + Fmat(dim, 4, 4);

    rep.e[1] = te[1] + te[3] + te[4];
    rep.f[1] = tf[1] + tf[3] + tf[4];
    rep.h[1] = th[1] + th[3] + th[4];
    rep.e[2] = te[2];
    rep.f[2] = tf[2];
    rep.h[2] = th[2];

    const double kappa = 1.0 / (3.0 + 2.0 * std::sqrt(3.0));
    const Complex eta = std::polar(1.0, std::numbers::pi / 3.0);
    const Complex ph = unit_phase(eval_k);
    rep.e[0] = kappa * ((1.0 / eta) * Fmat(dim, 4, 1) + 2.0 * Gmat(dim, 6, 2) + 2.0 * eta * Gmat(dim, 5, 1)) * ph;
    rep.f[0] = (1.0 / kappa) * (eta * Fmat(dim, 1, 4) + 0.5 * Gmat(dim, 2, 6) + 0.5 * (1.0 / eta) * Gmat(dim, 1, 5)) / ph;
    rep.h[0] = -2.0 * Fmat(dim, 1, 1) - Fmat(dim, 2, 2) - Fmat(dim, 3, 3);

    detail::finalize(rep);
    return rep;
}

// Untwisted A_n^(1) on C^{n+1} (simply-laced regression cases).
inline MatrixRep standard_rep_A1un(const AlgebraData& alg, const Rational& eval_k) {
    if (alg.g.family != Family::A) throw std::invalid_argument("standard_rep_A1un: need A_n");
    const int n = alg.rank();
    const int dim = n + 1;
    using detail::elem;

    MatrixRep rep;
    rep.alg = alg;
    rep.dim = dim;
    rep.eval_k = eval_k;
    rep.label = "A" + std::to_string(n) + "(1) std";
    rep.e.assign(n + 1, CMatrix::Zero(dim, dim));
    rep.f.assign(n + 1, CMatrix::Zero(dim, dim));
    rep.h.assign(n + 1, CMatrix::Zero(dim, dim));
    for (int i = 1; i <= n; ++i) {
        rep.e[i] = elem(dim, i, i + 1);
        rep.f[i] = elem(dim, i + 1, i);
        rep.h[i] = elem(dim, i, i) - elem(dim, i + 1, i + 1);
    }
    const Complex ph = unit_phase(eval_k);
    rep.e[0] = elem(dim, n + 1, 1) * ph;
    rep.f[0] = elem(dim, 1, n + 1) / ph;
    rep.h[0] = elem(dim, n + 1, n + 1) - elem(dim, 1, 1);

    detail::finalize(rep);
    return rep;
}

// The one-dimensional trivial representation (every generator zero).
inline MatrixRep trivial_rep(const AlgebraData& alg) {
    MatrixRep rep;
    rep.alg = alg;
    rep.dim = 1;
    rep.label = "trivial";
    const size_t ng = static_cast<size_t>(alg.rank()) + 1;
    rep.e.assign(ng, CMatrix::Zero(1, 1));
    rep.f.assign(ng, CMatrix::Zero(1, 1));
    rep.h.assign(ng, CMatrix::Zero(1, 1));
    rep.grading = CMatrix::Zero(1, 1);
    rep.grading_wt = {Rational(0)};
    rep.weights = {std::vector<std::int64_t>(alg.rank(), 0)};
    return rep;
}

// Dispatch to the standard (first fundamental) representation of ^L g^(1).
inline MatrixRep standard_rep(const AlgebraData& alg, const Rational& eval_k = Rational(0)) {
    switch (alg.g.family) {
        case Family::A: return standard_rep_A1un(alg, eval_k);
        case Family::B: return standard_rep_A2odd(alg, eval_k);
        case Family::C: return standard_rep_D2(alg, eval_k);
        case Family::G: return standard_rep_D43(alg, eval_k);
        default:
            throw std::invalid_argument("standard_rep: no matrix realization for " + alg.g.str());
    }
}

// --- functorial constructions --------------------------------------------

namespace detail {

struct WedgeBasis {
    std::vector<std::vector<int>> tuples;
    std::map<std::vector<int>, int> index;
};

inline WedgeBasis wedge_basis(int dim, int p) {
    WedgeBasis wb;
    std::vector<int> t(p);
    for (int i = 0; i < p; ++i) t[i] = i;
    while (true) {
        wb.index[t] = static_cast<int>(wb.tuples.size());
        wb.tuples.push_back(t);
        int i = p - 1;
        while (i >= 0 && t[i] == dim - p + i) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < p; ++j) t[j] = t[j - 1] + 1;
    }
    return wb;
}

// Leibniz action of a dim x dim operator on the wedge basis.
inline CMatrix wedge_operator(const CMatrix& A, const WedgeBasis& wb, int p) {
    const int wdim = static_cast<int>(wb.tuples.size());
    CMatrix W = CMatrix::Zero(wdim, wdim);
    const double tol = 0.0;
    for (int col = 0; col < wdim; ++col) {
        const auto& T = wb.tuples[col];
        for (int pos = 0; pos < p; ++pos) {
            for (int a = 0; a < A.rows(); ++a) {
                const Complex v = A(a, T[pos]);
                if (v == Complex(0, 0) && tol == 0.0) continue;
                // replace T[pos] by a, sort with sign
                bool dup = false;
                for (int q = 0; q < p; ++q)
                    if (q != pos && T[q] == a) { dup = true; break; }
                if (dup) continue;
                std::vector<int> S = T;
                S[pos] = a;
                int sign = 1;
                for (int q = 0; q + 1 < p; ++q)
                    for (int r1 = 0; r1 + 1 < p - q; ++r1)
                        if (S[r1] > S[r1 + 1]) { std::swap(S[r1], S[r1 + 1]); sign = -sign; }
                W(wb.index.at(S), col) += static_cast<double>(sign) * v;
            }
        }
    }
    return W;
}

} // namespace detail

// Exterior power of a representation; generators act by the Leibniz rule,
// weights add, eval_k is inherited.
inline MatrixRep wedge_rep(const MatrixRep& rep, int p) {
    if (p < 1 || p > rep.dim) throw std::invalid_argument("wedge_rep: p out of range");
    if (p == 1) return rep;
    auto wb = detail::wedge_basis(rep.dim, p);
    MatrixRep out;
    out.alg = rep.alg;
    out.dim = static_cast<int>(wb.tuples.size());
    out.eval_k = rep.eval_k;
    out.label = "wedge^" + std::to_string(p) + "(" + rep.label + ")";
    out.basis_tuples = wb.tuples;
    const size_t ng = rep.e.size();
    out.e.resize(ng); out.f.resize(ng); out.h.resize(ng);
    for (size_t g = 0; g < ng; ++g) {
        out.e[g] = detail::wedge_operator(rep.e[g], wb, p);
        out.f[g] = detail::wedge_operator(rep.f[g], wb, p);
        out.h[g] = detail::wedge_operator(rep.h[g], wb, p);
    }
    out.weights.resize(out.dim);
    out.grading_wt.resize(out.dim);
    out.grading = CMatrix::Zero(out.dim, out.dim);
    for (int b = 0; b < out.dim; ++b) {
        std::vector<std::int64_t> w(rep.n(), 0);
        Rational gw(0);
        for (int idx : wb.tuples[b]) {
            for (int i = 0; i < rep.n(); ++i) w[i] += rep.weights[idx][i];
            gw += rep.grading_wt[idx];
        }
        out.weights[b] = std::move(w);
        out.grading_wt[b] = gw;
        out.grading(b, b) = gw.to_double();
    }
    return out;
}

// Tensor product with Kronecker-sum action of every generator.
inline MatrixRep tensor_rep(const std::vector<MatrixRep>& reps) {
    if (reps.empty()) throw std::invalid_argument("tensor_rep: empty list");
    for (const auto& r : reps)
        if (!(r.alg.g == reps[0].alg.g)) throw std::invalid_argument("tensor_rep: mixed algebras");
    if (reps.size() == 1) return reps[0];
    if (reps.size() > 8) throw std::invalid_argument("tensor_rep: more than 8 factors");

    MatrixRep out;
    out.alg = reps[0].alg;
    out.dim = 1;
    for (const auto& r : reps) out.dim *= r.dim;
    out.eval_k = reps[0].eval_k;
    out.label = "tensor(";
    for (size_t i = 0; i < reps.size(); ++i) out.label += (i ? "," : "") + reps[i].label;
    out.label += ")";

    const size_t ng = reps[0].e.size();
    auto embed = [&](const CMatrix& A, size_t slot) {
        // I (x) ... (x) A (x) ... (x) I with A in the given slot
        CMatrix M = CMatrix::Zero(out.dim, out.dim);
        int before = 1, after = 1;
        for (size_t i = 0; i < slot; ++i) before *= reps[i].dim;
        for (size_t i = slot + 1; i < reps.size(); ++i) after *= reps[i].dim;
        const int d = static_cast<int>(A.rows());
        for (int b = 0; b < before; ++b)
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    if (A(r, c) == Complex(0, 0)) continue;
                    for (int a = 0; a < after; ++a)
                        M((b * d + r) * after + a, (b * d + c) * after + a) += A(r, c);
                }
        return M;
    };

    out.e.assign(ng, CMatrix());
    out.f.assign(ng, CMatrix());
    out.h.assign(ng, CMatrix());
    for (size_t g = 0; g < ng; ++g) {
        CMatrix E = CMatrix::Zero(out.dim, out.dim), F = E, H = E;
        for (size_t s = 0; s < reps.size(); ++s) {
            E += embed(reps[s].e[g], s);
            F += embed(reps[s].f[g], s);
            H += embed(reps[s].h[g], s);
        }
        out.e[g] = E; out.f[g] = F; out.h[g] = H;
    }

    out.weights.resize(out.dim);
    out.grading_wt.resize(out.dim);
    out.grading = CMatrix::Zero(out.dim, out.dim);
    for (int b = 0; b < out.dim; ++b) {
        std::vector<std::int64_t> w(out.n(), 0);
        Rational gw(0);
        int rem = b;
        int after = out.dim;
        for (size_t s = 0; s < reps.size(); ++s) {
            after /= reps[s].dim;
            const int idx = rem / after;
            rem %= after;
            for (int i = 0; i < out.n(); ++i) w[i] += reps[s].weights[idx][i];
            gw += reps[s].grading_wt[idx];
        }
        out.weights[b] = std::move(w);
        out.grading_wt[b] = gw;
        out.grading(b, b) = gw.to_double();
    }
    return out;
}

// Multiplies each generator by e^{2 pi i s d} with d its t-degree
// (e_0: +1, f_0: -1, all others 0).
inline MatrixRep evaluation_shift(const MatrixRep& rep, const Rational& s) {
    MatrixRep out = rep;
    const Complex ph = unit_phase(s);
    out.e[0] = rep.e[0] * ph;
    out.f[0] = rep.f[0] / ph;
    out.eval_k = rep.eval_k + s;
    if (s != Rational(0)) out.label = rep.label + " shift " + s.str();
    return out;
}

// base^{-k grading} as a diagonal matrix (used with base = omega, gamma).
inline CMatrix rotation_operator(const MatrixRep& rep, double k, const Complex& base) {
    const double theta = std::arg(base);
    CMatrix R = CMatrix::Zero(rep.dim, rep.dim);
    for (int b = 0; b < rep.dim; ++b)
        R(b, b) = std::polar(1.0, -theta * k * rep.grading_wt[b].to_double());
    return R;
}

inline CVector rotate_vector(const MatrixRep& rep, double k, const Complex& base, const CVector& v) {
    const double theta = std::arg(base);
    CVector out(rep.dim);
    for (int b = 0; b < rep.dim; ++b)
        out[b] = std::polar(1.0, -theta * k * rep.grading_wt[b].to_double()) * v[b];
    return out;
}

// --- fundamental representations V^(i) ------------------------------------

// V^(i) = L(omega_i)_{k_i}, realized by exterior powers of the standard
// representation where available. For C_n, i = n the spin representation is
// not constructed; the surrogate wedge^n L(omega_1) is returned flagged.
inline MatrixRep fundamental_rep(const AlgebraData& alg, int i) {
    const int n = alg.rank();
    if (i < 1 || i > n) throw std::invalid_argument("fundamental_rep: node out of range");
    switch (alg.g.family) {
        case Family::A: {
            MatrixRep std0 = standard_rep(alg, alg.k_of(i));
            MatrixRep out = wedge_rep(std0, i);
            out.label = alg.g.str() + " V(" + std::to_string(i) + ")";
            return out;
        }
        case Family::B: {
            MatrixRep std0 = standard_rep(alg, alg.k_of(i));
            MatrixRep out = wedge_rep(std0, i);
            out.label = alg.g.str() + " V(" + std::to_string(i) + ")";
            return out;
        }
        case Family::C: {
            // wedge^i L(omega_1)_{c_i/4}, c_i = 1 for even i; for i = n this
            // is the U^(n) surrogate of the spin representation.
            const Rational tw(i % 2 == 0 ? 1 : 0, 4);
            MatrixRep std0 = standard_rep(alg, tw);
            MatrixRep out = wedge_rep(std0, i);
            if (i == n) {
                out.spin_surrogate = true;
                out.label = alg.g.str() + " U(" + std::to_string(n) + ")";
            } else {
                out.label = alg.g.str() + " V(" + std::to_string(i) + ")";
            }
            return out;
        }
        case Family::G: {
            MatrixRep std0 = standard_rep(alg, alg.k_of(i));
            MatrixRep out = i == 1 ? std0 : wedge_rep(std0, 2);
            out.label = alg.g.str() + " V(" + std::to_string(i) + ")";
            return out;
        }
        default:
            throw std::invalid_argument("fundamental_rep: unsupported algebra " + alg.g.str());
    }
}

// Memoized fundamental representations (construction is pure but costly).
inline const MatrixRep& fundamental_rep_cached(const AlgebraData& alg, int i) {
    static std::map<std::pair<std::string, int>, MatrixRep> cache;
    const auto key = std::make_pair(alg.g.str(), i);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, fundamental_rep(alg, i)).first;
    return it->second;
}

// --- Chevalley relation check ---------------------------------------------

struct ChevalleyReport {
    double max_residual = 0;            // worst entrywise deviation
    std::vector<std::vector<double>> cartan; // extracted a_ij from [h_i, e_j] = a_ij e_j
    double grading_residual = 0;        // [grading, e_i] relations
};

// Verifies [h_i,h_j]=0, [e_i,f_j]=delta_ij h_i, [h_i,e_j]=a_ij e_j,
// [h_i,f_j]=-a_ij f_j, and the grading relations; the extracted a_ij on
// I x I must be the transpose of the folded Cartan matrix.
inline ChevalleyReport check_chevalley(const MatrixRep& rep) {
    ChevalleyReport rp;
    const size_t ng = rep.e.size();
    auto comm = [](const CMatrix& A, const CMatrix& B) -> CMatrix { return A * B - B * A; };
    auto maxabs = [](const CMatrix& M) { return M.cwiseAbs().maxCoeff(); };

    rp.cartan.assign(ng, std::vector<double>(ng, 0));
    for (size_t i = 0; i < ng; ++i) {
        for (size_t j = 0; j < ng; ++j) {
            rp.max_residual = std::max(rp.max_residual, maxabs(comm(rep.h[i], rep.h[j])));

            CMatrix ef = comm(rep.e[i], rep.f[j]);
            if (i == j) ef -= rep.h[i];
            rp.max_residual = std::max(rp.max_residual, maxabs(ef));

            // a_ij via the Frobenius inner product
            const CMatrix he = comm(rep.h[i], rep.e[j]);
            const double nj = rep.e[j].squaredNorm();
            const Complex a = (rep.e[j].conjugate().cwiseProduct(he)).sum() / nj;
            rp.cartan[i][j] = a.real();
            rp.max_residual = std::max(rp.max_residual, std::abs(a.imag()));
            rp.max_residual = std::max(rp.max_residual, maxabs(he - a * rep.e[j]));
            const CMatrix hf = comm(rep.h[i], rep.f[j]);
            rp.max_residual = std::max(rp.max_residual, maxabs(hf + a * rep.f[j]));
            rp.max_residual = std::max(rp.max_residual, std::abs(a.real() - std::llround(a.real())));
        }
    }
    // folded Cartan matrix appears transposed: [h_i, e_j] = C_ji e_j
    for (int i = 1; i < static_cast<int>(ng); ++i)
        for (int j = 1; j < static_cast<int>(ng); ++j)
            rp.max_residual = std::max(
                rp.max_residual,
                std::abs(rp.cartan[i][j] - static_cast<double>(rep.alg.cartan.C[j - 1][i - 1])));

    const std::int64_t hv = rep.alg.h_vee();
    for (size_t i = 0; i < ng; ++i) {
        const double deg = i == 0 ? -(static_cast<double>(hv) - 1.0) : 1.0;
        rp.grading_residual = std::max(rp.grading_residual,
                                       maxabs(comm(rep.grading, rep.e[i]) - deg * rep.e[i]));
        rp.grading_residual = std::max(rp.grading_residual,
                                       maxabs(comm(rep.grading, rep.f[i]) + deg * rep.f[i]));
    }
    return rp;
}

} // namespace odeim
