#pragma once

#include <Eigen/Eigenvalues>

#include "odeim/rep.hpp"

namespace odeim {

struct SpectralTolerances {
    double imag_rel = 1e-9; // |Im lambda| < imag_rel * scale
    double gap_rel = 1e-8;  // simplicity gap > gap_rel * scale
};

// Eigenanalysis of the cyclic element Lambda in one representation.
struct SpectralReport {
    std::vector<Complex> eigenvalues;
    bool has_maximal = false;
    double maximal = 0;     // the maximal eigenvalue (real part; imag below tolerance)
    CVector psi;            // its eigenvector, phase-fixed
    double gap = 0;         // maximal - max Re(other eigenvalues)
    double min_separation = 0; // distance to the nearest other eigenvalue
    double scale = 0;       // spectral radius
    std::string failure;    // why no maximal eigenvalue, when has_maximal = false
};

// Phase-fix: make the largest-magnitude coordinate real positive.
inline CVector phase_fix(const CVector& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    Complex ph = v[best] / std::abs(v[best]);
    return v / ph;
}

inline SpectralReport lambda_spectrum(const MatrixRep& rep, const SpectralTolerances& tol = {}) {
    SpectralReport out;
    Eigen::ComplexEigenSolver<CMatrix> es(rep.Lambda());
    if (es.info() != Eigen::Success) throw std::runtime_error("lambda_spectrum: eigensolver failed");
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + rep.dim);
    out.scale = 0;
    for (const Complex& z : out.eigenvalues) out.scale = std::max(out.scale, std::abs(z));
    if (out.scale == 0) { out.failure = "zero matrix"; return out; }

    int imax = 0;
    for (int i = 1; i < rep.dim; ++i)
        if (out.eigenvalues[i].real() > out.eigenvalues[imax].real()) imax = i;
    const Complex lam = out.eigenvalues[imax];

    out.gap = 1e300;
    out.min_separation = 1e300;
    for (int i = 0; i < rep.dim; ++i) {
        if (i == imax) continue;
        out.gap = std::min(out.gap, lam.real() - out.eigenvalues[i].real());
        out.min_separation = std::min(out.min_separation, std::abs(lam - out.eigenvalues[i]));
    }
    if (std::abs(lam.imag()) > tol.imag_rel * out.scale) {
        out.failure = "top eigenvalue is not real";
        return out;
    }
    if (out.min_separation <= tol.gap_rel * out.scale || out.gap <= tol.gap_rel * out.scale) {
        out.failure = "top eigenvalue is not simple / not strictly dominant";
        return out;
    }
    out.has_maximal = true;
    out.maximal = lam.real();
    out.psi = phase_fix(es.eigenvectors().col(imax));
    return out;
}

// Eigenbasis of a semisimple matrix, robust to repeated eigenvalues: the
// eigenvectors of each cluster are recomputed as a nullspace, so the
// returned Q is well conditioned whenever the matrix is genuinely
// diagonalizable.
struct Eigenbasis {
    std::vector<Complex> values; // per column
    CMatrix Q;
    CMatrix Qinv;
    double residual = 0; // || Q diag Qinv - A ||_max
};

inline Eigenbasis semisimple_eigenbasis(const CMatrix& A, double cluster_tol = 1e-9) {
    const int n = static_cast<int>(A.rows());
    Eigen::ComplexEigenSolver<CMatrix> es(A);
    if (es.info() != Eigen::Success) throw std::runtime_error("semisimple_eigenbasis: solver failed");
    std::vector<Complex> evs(es.eigenvalues().data(), es.eigenvalues().data() + n);
    double scale = 0;
    for (const auto& z : evs) scale = std::max(scale, std::abs(z));
    const double tol = cluster_tol * std::max(scale, 1.0);

    std::vector<bool> used(n, false);
    Eigenbasis out;
    out.Q.resize(n, n);
    int col = 0;
    for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        std::vector<int> cluster{i};
        used[i] = true;
        for (int j = i + 1; j < n; ++j)
            if (!used[j] && std::abs(evs[j] - evs[i]) < tol) {
                cluster.push_back(j);
                used[j] = true;
            }
        Complex mu = 0;
        for (int j : cluster) mu += evs[j];
        mu /= static_cast<double>(cluster.size());
        if (cluster.size() == 1) {
            out.values.push_back(evs[i]);
            out.Q.col(col++) = es.eigenvectors().col(i);
        } else {
            Eigen::BDCSVD<CMatrix> svd(A - mu * CMatrix::Identity(n, n), Eigen::ComputeFullV);
            for (size_t k = 0; k < cluster.size(); ++k) {
                out.values.push_back(mu);
                out.Q.col(col++) = svd.matrixV().col(n - 1 - static_cast<int>(k));
            }
        }
    }
    out.Qinv = out.Q.fullPivLu().inverse();
    CMatrix recon = CMatrix::Zero(n, n);
    for (int c = 0; c < n; ++c) recon.col(c) = out.values[c] * out.Q.col(c);
    out.residual = (out.Q * out.Qinv * A - A).cwiseAbs().maxCoeff() +
                   (recon * out.Qinv - A).cwiseAbs().maxCoeff();
    if (out.residual > 1e-7 * std::max(1.0, scale))
        throw std::runtime_error("semisimple_eigenbasis: matrix appears defective");
    return out;
}

// det(xI - Lambda) coefficients, highest degree first, computed from the
// eigenvalues. snap() zeroes near-vanishing coefficients for reporting.
inline std::vector<Complex> characteristic_polynomial(const MatrixRep& rep) {
    Eigen::ComplexEigenSolver<CMatrix> es(rep.Lambda());
    std::vector<Complex> coeff{1.0};
    for (int i = 0; i < rep.dim; ++i) {
        const Complex r = es.eigenvalues()[i];
        coeff.push_back(0.0);
        for (size_t j = coeff.size() - 1; j >= 1; --j) coeff[j] -= r * coeff[j - 1];
    }
    return coeff;
}

inline std::vector<Complex> snap_coefficients(std::vector<Complex> c, double rel = 1e-8) {
    double scale = 0;
    for (const auto& z : c) scale = std::max(scale, std::abs(z));
    for (auto& z : c) {
        if (std::abs(z.real()) < rel * scale) z.real(0.0);
        if (std::abs(z.imag()) < rel * scale) z.imag(0.0);
    }
    return c;
}

// Maximal eigenvalues lambda^(i) for every i in I, with the C_n spin value
// recovered from the wedge surrogate U^(n) via
// lambda-hat = (gamma^{1/4} + gamma^{-1/4}) lambda^(n).
struct LambdaTable {
    std::vector<double> lambda;      // 1-based semantics, index i-1
    std::vector<SpectralReport> reports;
    std::vector<bool> surrogate;     // true where the value came from U^(n)
};

inline LambdaTable lambda_table(const AlgebraData& alg) {
    LambdaTable t;
    const int n = alg.rank();
    t.lambda.resize(n);
    t.reports.resize(n);
    t.surrogate.assign(n, false);
    for (int i = 1; i <= n; ++i) {
        const MatrixRep& rep = fundamental_rep_cached(alg, i);
        SpectralReport rp = lambda_spectrum(rep);
        if (!rp.has_maximal)
            throw std::runtime_error("lambda_table: no maximal eigenvalue in " + rep.label + ": " + rp.failure);
        if (rep.spin_surrogate) {
            const double c = 2.0 * std::cos(alg.gamma_arg() / 4.0); // gamma^{1/4}+gamma^{-1/4}
            t.lambda[i - 1] = rp.maximal / c;
            t.surrogate[i - 1] = true;
        } else {
            t.lambda[i - 1] = rp.maximal;
        }
        t.reports[i - 1] = std::move(rp);
    }
    return t;
}

// Residuals of the linear relations
//   (gamma^{-D_i/2}+gamma^{D_i/2}) lambda^(i)
//     = sum_j sum_{l=0}^{B_ij-1} gamma^{(B_ij-1-2l)/2r} lambda^(j).
struct RelationReport {
    std::vector<double> lambda;
    std::vector<double> residual; // per i
    std::vector<Complex> mu;      // per i
};

inline RelationReport verify_lambda_relations(const AlgebraData& alg) {
    RelationReport rr;
    LambdaTable t = lambda_table(alg);
    rr.lambda = t.lambda;
    const int n = alg.rank();
    const int r = alg.fold.r;
    for (int i = 1; i <= n; ++i) {
        const double Di = alg.D_of(i).to_double();
        const Complex lhs = (alg.gamma(-Di / 2.0) + alg.gamma(Di / 2.0)) * t.lambda[i - 1];
        Complex rhs = 0;
        for (int j = 1; j <= n; ++j) {
            const std::int64_t Bij = alg.cartan.B[i - 1][j - 1];
            for (std::int64_t l = 0; l < Bij; ++l)
                rhs += alg.gamma(static_cast<double>(Bij - 1 - 2 * l) / (2.0 * r)) * t.lambda[j - 1];
        }
        rr.mu.push_back(lhs);
        rr.residual.push_back(std::abs(lhs - rhs));
    }
    return rr;
}

// Thm 4.6 iii/iv data: the tensor product over the incidence row and the
// wedge square of V^(i)_{D_i/2} both carry the maximal eigenvalue mu_i.
struct TensorMaximal {
    SpectralReport tensor_report;
    SpectralReport wedge_report;
    double mu = 0;            // (gamma^{-D_i/2}+gamma^{D_i/2}) lambda^(i)
    double tensor_residual = 0;
    double wedge_residual = 0;
};

// The tensor-target factors V^(j)_{(B_ij-1-2l)/2r}, in (j, l) order. For C_n
// and i = n-1 the spin pair V^(n)_{1/4} (x) V^(n)_{-1/4} is replaced by the
// surrogate U^(n).
struct PsiFactor {
    int j = 0;          // node
    Rational shift;     // evaluation shift relative to V^(j)
    bool surrogate = false;
    MatrixRep rep;
};

inline std::vector<PsiFactor> psi_factor_list(const AlgebraData& alg, int i) {
    std::vector<PsiFactor> factors;
    const int n = alg.rank();
    const int r = alg.fold.r;
    for (int j = 1; j <= n; ++j) {
        const std::int64_t Bij = alg.cartan.B[i - 1][j - 1];
        if (Bij == 0) continue;
        if (alg.g.family == Family::C && j == n) {
            // V^(n)_{1/4} (x) V^(n)_{-1/4} ~ U^(n) + lower pieces
            factors.push_back({n, Rational(0), true, fundamental_rep_cached(alg, n)});
            continue;
        }
        for (std::int64_t l = 0; l < Bij; ++l) {
            const Rational s(Bij - 1 - 2 * l, 2 * r);
            factors.push_back({j, s, false, evaluation_shift(fundamental_rep_cached(alg, j), s)});
        }
    }
    return factors;
}

inline std::vector<MatrixRep> psi_tensor_factors(const AlgebraData& alg, int i) {
    std::vector<MatrixRep> out;
    for (auto& f : psi_factor_list(alg, i)) out.push_back(std::move(f.rep));
    return out;
}

// Tensor product of the Psi-system target factors; the empty product (A_1)
// is the trivial representation.
inline MatrixRep psi_tensor_target(const AlgebraData& alg, int i) {
    auto factors = psi_tensor_factors(alg, i);
    if (factors.empty()) return trivial_rep(alg);
    return tensor_rep(factors);
}

inline TensorMaximal maximal_in_tensor(const AlgebraData& alg, int i) {
    TensorMaximal out;
    LambdaTable t = lambda_table(alg);
    const double Di = alg.D_of(i).to_double();
    out.mu = (2.0 * std::cos(alg.gamma_arg() * Di / 2.0)) * t.lambda[i - 1];

    MatrixRep target = psi_tensor_target(alg, i);
    out.tensor_report = lambda_spectrum(target);
    if (out.tensor_report.has_maximal)
        out.tensor_residual = std::abs(out.tensor_report.maximal - out.mu);

    if (alg.g.family == Family::C && i == alg.rank()) {
        out.wedge_report.failure = "spin source not constructed for C_n, i = n";
        out.wedge_residual = -1;
        return out;
    }
    MatrixRep wedge = wedge_rep(evaluation_shift(fundamental_rep_cached(alg, i), alg.D_of(i) / Rational(2)), 2);
    out.wedge_report = lambda_spectrum(wedge);
    if (out.wedge_report.has_maximal)
        out.wedge_residual = std::abs(out.wedge_report.maximal - out.mu);
    return out;
}

} // namespace odeim
