#pragma once

#include "odeim/connection.hpp"
#include "odeim/intertwiner.hpp"

namespace odeim {

// Frobenius fundamental system at the regular singular point x = 0 for
// integer M h^vee: one series solution x^{-a_b}(e_b + O(x)) per basis
// direction, a_b the ell-eigenvalue on that direction.
struct FrobeniusBasis {
    std::vector<Complex> exponents; // a_b per column
    CMatrix F;                      // fundamental matrix at x0
    double x0 = 0;
    int N = 0;
    double tail = 0;                // worst relative last-term size
    double cond = 0;                // condition number of F
};

inline std::vector<Complex> frobenius_exponents(const MatrixRep& rep, const std::vector<Complex>& ell) {
    std::vector<Complex> out(rep.dim, 0.0);
    for (int b = 0; b < rep.dim; ++b)
        for (int i = 0; i < rep.n(); ++i)
            out[b] += ell[i] * static_cast<double>(rep.weights[b][i]);
    return out;
}

// Non-resonance filter: no two exponents may differ by a nonzero integer
// (within tol); exponent collisions (difference zero) are allowed.
inline bool exponents_resonant(const std::vector<Complex>& a, double tol = 1e-4) {
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < a.size(); ++j) {
            if (i == j) continue;
            const Complex d = a[i] - a[j];
            const double nearest = std::round(d.real());
            if (std::abs(nearest) >= 0.5 && std::abs(d.real() - nearest) < tol && std::abs(d.imag()) < tol)
                return true;
        }
    return false;
}

inline FrobeniusBasis frobenius_basis(const ConnectionContext& cx, const Complex& E, double x0,
                                      int Nmax = 400) {
    const double Mh = cx.Mh();
    const int P = static_cast<int>(std::llround(Mh));
    if (std::abs(Mh - P) > 1e-9 || P < 1)
        throw std::invalid_argument("frobenius_basis: M h^vee must be a positive integer");
    const int dim = cx.rep.dim;

    FrobeniusBasis fb;
    fb.x0 = x0;
    fb.exponents = frobenius_exponents(cx.rep, cx.ell);
    if (exponents_resonant(fb.exponents))
        throw std::invalid_argument("frobenius_basis: resonant exponents for this ell");

    const CMatrix B0 = cx.e_sum + (-E) * cx.rep.e[0]; // B(x) = B0 + x^P e_0
    const CMatrix& BP = cx.rep.e[0];

    fb.F = CMatrix::Zero(dim, dim);
    fb.tail = 0;
    for (int b = 0; b < dim; ++b) {
        const Complex a = fb.exponents[b];
        std::vector<CVector> c;
        c.push_back(CVector::Zero(dim));
        c[0][b] = 1.0;
        CVector val = c[0];
        double lastrel = 1.0;
        int m = 1;
        for (; m <= Nmax; ++m) {
            CVector rhs = -(B0 * c[m - 1]);
            if (m - 1 - P >= 0) rhs -= BP * c[m - 1 - P];
            CVector cm(dim);
            for (int j = 0; j < dim; ++j) cm[j] = rhs[j] / (fb.exponents[j] + static_cast<double>(m) - a);
            c.push_back(cm);
            const Complex xm = std::pow(Complex(x0, 0), m);
            val += cm * xm;
            lastrel = (cm * xm).norm() / std::max(val.norm(), 1e-300);
            if (lastrel < 1e-16 && m > P + 2) break;
        }
        fb.N = std::max(fb.N, m);
        fb.tail = std::max(fb.tail, lastrel);
        fb.F.col(b) = std::pow(Complex(x0, 0), -a) * val;
    }
    Eigen::JacobiSVD<CMatrix> svd(fb.F);
    fb.cond = svd.singularValues()[0] / svd.singularValues()[dim - 1];
    return fb;
}

// One Q/Q-tilde extraction: indices of the chi and phi directions plus the
// phi normalization constant z (phi's leading coefficient is z * e_phi).
struct QExtraction {
    int chi_index = -1;
    int phi_index = -1;
    Complex z = 1.0;
};

// Default (w_l = identity) extraction data for V^(i): chi along the highest
// weight, phi along weight omega_i - alpha_i, z fixed through m_i.
inline QExtraction default_extraction(const AlgebraData& alg, int i, const Morphism& m) {
    const MatrixRep& vi = fundamental_rep_cached(alg, i);
    QExtraction qe;
    qe.chi_index = vi.highest_weight_index();

    std::vector<std::int64_t> w = vi.weights[qe.chi_index]; // = omega_i
    for (int k = 0; k < alg.rank(); ++k) {
        if (w[k] != (k == i - 1 ? 1 : 0))
            throw std::logic_error("default_extraction: highest weight is not omega_i");
        w[k] -= alg.cartan.C[i - 1][k]; // alpha_i(h_k) = C_ik
    }
    auto idxs = vi.weight_indices(w);
    if (idxs.size() != 1)
        throw std::logic_error("default_extraction: weight omega_i - alpha_i not simple");
    qe.phi_index = idxs[0];

    // z from m_i(chi ^ phi) = (x) chi_j: target coordinate at (x) v_j
    CVector echi = CVector::Zero(vi.dim), ephi = CVector::Zero(vi.dim);
    echi[qe.chi_index] = 1.0;
    ephi[qe.phi_index] = 1.0;
    CVector img = m.apply(wedge2_vector(m.source, echi, ephi));
    int t0 = 0;
    for (const auto& fac : psi_tensor_factors(alg, i)) t0 = t0 * fac.dim + fac.highest_weight_index();
    const Complex coeff = img[t0];
    if (std::abs(coeff) < 1e-9)
        throw std::logic_error("default_extraction: m_i normalization entry vanishes");
    qe.z = 1.0 / coeff;
    return qe;
}

struct QSample {
    Complex E;
    Complex Q = 0;
    Complex Qt = 0;
    double cond = 0;   // extraction solve conditioning
    double x0 = 0;
};

// Q^(i)(E), Q~^(i)(E): coefficients of the subdominant solution along the
// two most singular monodromy eigendirections at x = 0.
inline QSample extract_q(const ConnectionContext& cx, const QExtraction& qe, const Complex& E,
                         double x0 = 0.5) {
    FrobeniusBasis fb = frobenius_basis(cx, E, x0);
    if (fb.cond > 1e10)
        throw std::runtime_error("extract_q: fundamental matrix too ill-conditioned at x0");
    CVector psi_at_x0 = subdominant_at(cx, E, x0);
    CVector c = fb.F.fullPivLu().solve(psi_at_x0);
    QSample qs;
    qs.E = E;
    qs.Q = c[qe.chi_index];
    qs.Qt = c[qe.phi_index] / qe.z;
    qs.cond = fb.cond;
    qs.x0 = x0;
    return qs;
}

} // namespace odeim
