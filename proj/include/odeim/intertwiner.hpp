#pragma once

#include <Eigen/SVD>
#include <Eigen/SparseCore>
#include <map>
#include <optional>

#include "odeim/spectra.hpp"

namespace odeim {

// Coordinates of u ^ v in a wedge-square representation built by wedge_rep.
inline CVector wedge2_vector(const MatrixRep& wedge, const CVector& u, const CVector& v) {
    CVector out(wedge.dim);
    for (int b = 0; b < wedge.dim; ++b) {
        const int i = wedge.basis_tuples[b][0], j = wedge.basis_tuples[b][1];
        out[b] = u[i] * v[j] - u[j] * v[i];
    }
    return out;
}

// Kronecker product of vectors, slot order matching tensor_rep.
inline CVector tensor_vector(const std::vector<CVector>& factors) {
    CVector out = factors[0];
    for (size_t s = 1; s < factors.size(); ++s) {
        CVector next(out.size() * factors[s].size());
        for (int a = 0; a < out.size(); ++a)
            for (int b = 0; b < factors[s].size(); ++b)
                next[a * factors[s].size() + b] = out[a] * factors[s][b];
        out = std::move(next);
    }
    return out;
}

struct IntertwinerSolution {
    std::vector<CMatrix> basis;  // nullspace basis as tgt.dim x src.dim maps
    int nullity = 0;
    double residual = 0;         // equivariance residual of basis[0], if any
    int unknowns = 0;            // weight-compatible entries
};

namespace detail {

struct EquivariantSystem {
    std::vector<std::pair<int, int>> unknown; // (tgt index a, src index b)
    std::map<std::pair<int, int>, int> unknown_id;
    std::vector<Eigen::Triplet<Complex>> trip;
    int rows = 0;

    std::map<std::tuple<int, int, int>, int> row_id; // (generator, a, b) -> row

    int row(int g, int a, int b) {
        auto key = std::make_tuple(g, a, b);
        auto it = row_id.find(key);
        if (it != row_id.end()) return it->second;
        row_id.emplace(key, rows);
        return rows++;
    }
};

// Unknowns restricted to equal-weight pairs: h-equivariance is imposed
// exactly, only the e-equations enter the linear system (in an evaluation
// representation the affine raising operators generate the whole image
// algebra; the caller checks the full residual afterwards).
inline EquivariantSystem build_equivariant_system(const MatrixRep& src, const MatrixRep& tgt) {
    if (!(src.alg.g == tgt.alg.g))
        throw std::invalid_argument("solve_intertwiner: representations of different algebras");
    EquivariantSystem sys;

    std::map<std::vector<std::int64_t>, std::vector<int>> by_weight_src, by_weight_tgt;
    for (int b = 0; b < src.dim; ++b) by_weight_src[src.weights[b]].push_back(b);
    for (int a = 0; a < tgt.dim; ++a) by_weight_tgt[tgt.weights[a]].push_back(a);
    for (const auto& [w, srcs] : by_weight_src) {
        auto it = by_weight_tgt.find(w);
        if (it == by_weight_tgt.end()) continue;
        for (int a : it->second)
            for (int b : srcs) {
                sys.unknown_id[{a, b}] = static_cast<int>(sys.unknown.size());
                sys.unknown.emplace_back(a, b);
            }
    }

    const double tol = 1e-13;
    const int ng = static_cast<int>(src.e.size());
    for (int g = 0; g < ng; ++g) {
        const CMatrix& S = src.e[g];
        const CMatrix& T = tgt.e[g];
        // M S - T M = 0, rows indexed by entries (a, b)
        for (int u = 0; u < static_cast<int>(sys.unknown.size()); ++u) {
            const auto [a, c] = sys.unknown[u];
            for (int b = 0; b < src.dim; ++b) {
                if (std::abs(S(c, b)) < tol) continue;
                sys.trip.emplace_back(sys.row(g, a, b), u, S(c, b));
            }
        }
        for (int u = 0; u < static_cast<int>(sys.unknown.size()); ++u) {
            const auto [c, b] = sys.unknown[u];
            for (int a = 0; a < tgt.dim; ++a) {
                if (std::abs(T(a, c)) < tol) continue;
                sys.trip.emplace_back(sys.row(g, a, b), u, -T(a, c));
            }
        }
    }
    return sys;
}

inline double equivariance_residual(const MatrixRep& src, const MatrixRep& tgt, const CMatrix& M) {
    double worst = 0;
    for (size_t g = 0; g < src.e.size(); ++g) {
        worst = std::max(worst, (M * src.e[g] - tgt.e[g] * M).cwiseAbs().maxCoeff());
        worst = std::max(worst, (M * src.f[g] - tgt.f[g] * M).cwiseAbs().maxCoeff());
        worst = std::max(worst, (M * src.h[g] - tgt.h[g] * M).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace detail

// Nullspace of the equivariance system {M rho_src(g) = rho_tgt(g) M} via the
// Gram matrix A^H A. The nonzero singular values of these systems are O(1),
// so squaring keeps a huge gap to the null ones.
inline IntertwinerSolution solve_intertwiner(const MatrixRep& src, const MatrixRep& tgt,
                                             double svd_rel_tol = 1e-8, int dense_limit = 4000) {
    auto sys = detail::build_equivariant_system(src, tgt);
    IntertwinerSolution sol;
    sol.unknowns = static_cast<int>(sys.unknown.size());
    if (sol.unknowns == 0) return sol;
    if (sol.unknowns > dense_limit)
        throw std::runtime_error("solve_intertwiner: reduced system too large (" +
                                 std::to_string(sol.unknowns) + " unknowns)");

    Eigen::SparseMatrix<Complex> A(sys.rows, sol.unknowns);
    A.setFromTriplets(sys.trip.begin(), sys.trip.end());
    A.makeCompressed();
    CMatrix G = CMatrix(Eigen::SparseMatrix<Complex>(A.adjoint() * A));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(G);
    if (es.info() != Eigen::Success) throw std::runtime_error("solve_intertwiner: eigensolver failed");
    const auto& ev = es.eigenvalues();
    const double emax = ev[sol.unknowns - 1];
    // squared threshold, floored above the eigensolver's backward-error noise
    const double cutoff = std::max(svd_rel_tol * svd_rel_tol, 1e-11) * std::max(emax, 1e-300);
    if (emax <= 0) {
        sol.nullity = sol.unknowns;
    } else {
        sol.nullity = 0;
        while (sol.nullity < sol.unknowns && ev[sol.nullity] < cutoff) ++sol.nullity;
    }
    auto unpack = [&](const CVector& x) {
        CMatrix M = CMatrix::Zero(tgt.dim, src.dim);
        for (int u = 0; u < sol.unknowns; ++u) M(sys.unknown[u].first, sys.unknown[u].second) = x[u];
        return M;
    };
    for (int k = 0; k < sol.nullity; ++k) sol.basis.push_back(unpack(es.eigenvectors().col(k)));
    if (!sol.basis.empty()) sol.residual = detail::equivariance_residual(src, tgt, sol.basis[0]);
    return sol;
}

// R_i : V^(i)_k -> V^(i)_{k + D_i}, the evaluation-representation
// isomorphism, normalized to 1 on the highest weight line. Identity when
// D_i = 1.
inline CMatrix R_isomorphism(const AlgebraData& alg, int i) {
    const MatrixRep& rep = fundamental_rep_cached(alg, i);
    if (alg.D_of(i) == Rational(1)) return CMatrix::Identity(rep.dim, rep.dim);
    MatrixRep shifted = evaluation_shift(rep, alg.D_of(i));
    auto sol = solve_intertwiner(rep, shifted);
    if (sol.nullity != 1)
        throw std::runtime_error("R_isomorphism: equivariance space has dimension " +
                                 std::to_string(sol.nullity) + " for " + rep.label);
    CMatrix R = sol.basis[0];
    const int hw = rep.highest_weight_index();
    if (std::abs(R(hw, hw)) < 1e-12)
        throw std::runtime_error("R_isomorphism: vanishing highest-weight entry");
    return R / R(hw, hw);
}

// Paired bases of the submodules generated by (w0, t0) in source and
// target: columns of L are an orthonormal basis of <w0>, column k of T is
// the image of column k under the unique morphism sending w0 to t0.
struct PairedSubmodule {
    CMatrix L; // src.dim x d
    CMatrix T; // tgt.dim x d
};

inline PairedSubmodule grow_paired_submodule(const MatrixRep& src, const MatrixRep& tgt,
                                             const CVector& w0, const CVector& t0,
                                             double rel_tol = 1e-8) {
    std::vector<CVector> Lb, Tb;
    const double n0 = w0.norm();
    Lb.push_back(w0 / n0);
    Tb.push_back(t0 / n0);
    size_t next = 0;
    while (next < Lb.size()) {
        const CVector x0 = Lb[next];
        const CVector y0 = Tb[next];
        ++next;
        for (size_t g = 0; g < 2 * src.e.size(); ++g) {
            const CMatrix& S = g < src.e.size() ? src.e[g] : src.f[g - src.e.size()];
            const CMatrix& T = g < src.e.size() ? tgt.e[g] : tgt.f[g - src.e.size()];
            CVector x = S * x0;
            CVector y = T * y0;
            const double pre = x.norm();
            if (pre < 1e-14) continue;
            for (int pass = 0; pass < 2; ++pass) {
                for (size_t j = 0; j < Lb.size(); ++j) {
                    const Complex c = Lb[j].dot(x);
                    x -= c * Lb[j];
                    y -= c * Tb[j];
                }
            }
            if (x.norm() > rel_tol * pre) {
                const double nx = x.norm();
                Lb.push_back(x / nx);
                Tb.push_back(y / nx);
            }
        }
    }
    PairedSubmodule ps;
    ps.L.resize(src.dim, static_cast<int>(Lb.size()));
    ps.T.resize(tgt.dim, static_cast<int>(Lb.size()));
    for (size_t k = 0; k < Lb.size(); ++k) {
        ps.L.col(static_cast<int>(k)) = Lb[k];
        ps.T.col(static_cast<int>(k)) = Tb[k];
    }
    return ps;
}

// The morphism m_i : wedge^2 V^(i)_{D_i/2} -> (x)_{j,l} V^(j)_{(B_ij-1-2l)/2r},
// normalized by m_i(f_i v_i ^ v_i) = (x)_j v_j and vanishing on the
// complement of L(eta_i). Always represented by the paired submodule bases;
// for small systems the full matrix (kernel = U) is solved as well and
// cross-checked.
struct Morphism {
    MatrixRep source;  // wedge^2 V^(i)_{D_i/2}
    MatrixRep target;  // tensor of psi_tensor_factors
    PairedSubmodule sub;
    std::optional<CMatrix> matrix; // true m_i with ker = U, small systems only
    int submodule_dim = 0;         // dim L(eta_i)
    int raw_nullity = -1;          // bare equivariance space (when computed)
    int nullity = 1;               // morphism space after the kernel condition
    double residual = 0;           // equivariance residual (matrix path)
    int rank = -1;                 // rank of the full matrix (when computed)

    // m_i(x) for x in the L(eta_i) summand; *off_component reports the
    // relative norm of the part of x outside the summand.
    CVector apply(const CVector& x, double* off_component = nullptr) const {
        CVector c = sub.L.adjoint() * x;
        if (off_component) {
            const double nx = x.norm();
            *off_component = nx > 0 ? (x - sub.L * c).norm() / nx : 0.0;
        }
        return sub.T * c;
    }
};

// Invariant vectors of a representation (common nullspace of all e's, f's).
inline std::vector<CVector> invariant_vectors(const MatrixRep& rep) {
    CMatrix stack(2 * static_cast<int>(rep.e.size()) * rep.dim, rep.dim);
    int r = 0;
    for (size_t g = 0; g < rep.e.size(); ++g) {
        stack.middleRows(r, rep.dim) = rep.e[g]; r += rep.dim;
        stack.middleRows(r, rep.dim) = rep.f[g]; r += rep.dim;
    }
    Eigen::BDCSVD<CMatrix> svd(stack, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<CVector> out;
    for (int k = 0; k < rep.dim; ++k)
        if (k >= sv.size() || sv[k] < 1e-9 * sv[0]) out.push_back(svd.matrixV().col(k));
    return out;
}

inline Morphism build_m_i(const AlgebraData& alg, int i, bool want_matrix = true) {
    if (alg.g.family == Family::C && i == alg.rank())
        throw std::invalid_argument("build_m_i: spin source not constructed for C_n, i = n");
    Morphism m;
    const MatrixRep& vi = fundamental_rep_cached(alg, i);
    m.source = wedge_rep(evaluation_shift(vi, alg.D_of(i) / Rational(2)), 2);
    m.target = psi_tensor_target(alg, i);

    const int hw = vi.highest_weight_index();
    CVector v0 = CVector::Zero(vi.dim);
    v0[hw] = 1.0;
    CVector w0 = wedge2_vector(m.source, vi.f[i] * v0, v0);
    CVector t0 = CVector::Zero(m.target.dim);
    {
        int idx = 0;
        for (const auto& fac : psi_tensor_factors(alg, i)) idx = idx * fac.dim + fac.highest_weight_index();
        t0[idx] = 1.0;
    }
    m.sub = grow_paired_submodule(m.source, m.target, w0, t0);
    m.submodule_dim = static_cast<int>(m.sub.L.cols());
    if (m.submodule_dim >= m.source.dim + 1)
        throw std::runtime_error("build_m_i: submodule growth overflow");

    // consistency: the paired map is equivariant on its domain
    {
        double worst = 0;
        for (size_t g = 0; g < m.source.e.size(); ++g) {
            worst = std::max(worst, (m.sub.T * (m.sub.L.adjoint() * (m.source.e[g] * m.sub.L)) -
                                     m.target.e[g] * m.sub.T)
                                        .cwiseAbs()
                                        .maxCoeff());
            worst = std::max(worst, (m.sub.T * (m.sub.L.adjoint() * (m.source.f[g] * m.sub.L)) -
                                     m.target.f[g] * m.sub.T)
                                        .cwiseAbs()
                                        .maxCoeff());
        }
        m.residual = worst;
        if (worst > 1e-7)
            throw std::runtime_error("build_m_i: paired submodule is not closed (residual " +
                                     std::to_string(worst) + ")");
    }

    if (!want_matrix) return m;

    // full matrix with ker = U, from the equivariance nullspace
    auto sys_size = [&] {
        std::map<std::vector<std::int64_t>, int> ms, mt;
        for (int b = 0; b < m.source.dim; ++b) ++ms[m.source.weights[b]];
        for (int a = 0; a < m.target.dim; ++a) ++mt[m.target.weights[a]];
        long total = 0;
        for (const auto& [w, c] : ms) {
            auto it = mt.find(w);
            if (it != mt.end()) total += static_cast<long>(c) * it->second;
        }
        return total;
    }();
    if (sys_size > 4000) return m; // paired form only

    auto sol = solve_intertwiner(m.source, m.target);
    m.raw_nullity = sol.nullity;
    if (sol.nullity < 1 || sol.basis.empty())
        throw std::runtime_error("build_m_i: no equivariant map for " + m.source.label);

    CMatrix M;
    if (sol.nullity == 1) {
        M = sol.basis[0];
        m.nullity = 1;
    } else {
        // combinations killing the invariant part of the source (the only
        // shared summands seen at desk scale are trivial ones)
        auto inv = invariant_vectors(m.source);
        if (inv.empty())
            throw std::runtime_error("build_m_i: ambiguous equivariance space without invariants in " +
                                     m.source.label);
        CMatrix cond(static_cast<int>(inv.size()) * m.target.dim, sol.nullity);
        for (int a = 0; a < sol.nullity; ++a)
            for (size_t z = 0; z < inv.size(); ++z)
                cond.block(static_cast<int>(z) * m.target.dim, a, m.target.dim, 1) = sol.basis[a] * inv[z];
        Eigen::BDCSVD<CMatrix> csvd(cond, Eigen::ComputeFullV);
        const auto& sv = csvd.singularValues();
        int crank = 0;
        for (int k = 0; k < sv.size(); ++k)
            if (sv[k] > 1e-8 * sv[0]) ++crank;
        m.nullity = sol.nullity - crank;
        if (m.nullity != 1)
            throw std::runtime_error("build_m_i: constrained morphism space has dimension " +
                                     std::to_string(m.nullity) + " for " + m.source.label);
        M = CMatrix::Zero(m.target.dim, m.source.dim);
        for (int a = 0; a < sol.nullity; ++a)
            M += csvd.matrixV()(a, sol.nullity - 1) * sol.basis[a];
    }

    // normalization m(w0) = t0, then cross-check against the paired form
    CVector img = M * w0;
    int t0idx = 0;
    for (; t0idx < m.target.dim; ++t0idx)
        if (std::abs(t0[t0idx]) > 0.5) break;
    const Complex c = img[t0idx];
    if (std::abs(c) < 1e-10 * img.norm())
        throw std::runtime_error("build_m_i: normalization coefficient vanishes");
    M /= c;
    m.residual = std::max(m.residual, detail::equivariance_residual(m.source, m.target, M));
    {
        Eigen::BDCSVD<CMatrix> svd(M);
        const auto& sv = svd.singularValues();
        m.rank = 0;
        for (int k = 0; k < sv.size(); ++k)
            if (sv[k] > 1e-8 * sv[0]) ++m.rank;
        if (m.rank != m.submodule_dim)
            throw std::runtime_error("build_m_i: matrix rank disagrees with submodule dimension");
        const double agree = (M * m.sub.L - m.sub.T).cwiseAbs().maxCoeff();
        if (agree > 1e-7)
            throw std::runtime_error("build_m_i: matrix and paired forms disagree (" +
                                     std::to_string(agree) + ")");
    }
    m.matrix = M;
    return m;
}

// Algebraic Psi-system check (one node): both sides built from the maximal
// eigenvectors, the scalar beta_i fitted, residual after the fit.
struct AlgebraicPsiResult {
    Complex beta = 0;
    double residual = 1;
    double mu = 0;
    double off_component = 0; // wedge vector outside the L(eta_i) summand
};

inline AlgebraicPsiResult verify_algebraic_psi(const AlgebraData& alg, int i, const Morphism& m,
                                               const CMatrix& Ri, const LambdaTable& table) {
    AlgebraicPsiResult out;
    const MatrixRep& vi = fundamental_rep_cached(alg, i);
    const Complex gamma = alg.gamma();
    const double Di = alg.D_of(i).to_double();
    const CVector& psi = table.reports[i - 1].psi;

    CVector left = Ri * rotate_vector(vi, -Di / 2.0, gamma, psi);
    CVector right = rotate_vector(vi, Di / 2.0, gamma, psi);
    CVector w = wedge2_vector(m.source, left, right);
    CVector lhs = m.apply(w, &out.off_component);

    auto factors = psi_factor_list(alg, i);
    std::vector<CVector> vecs;
    for (const auto& fac : factors) {
        if (fac.surrogate) {
            vecs.push_back(table.reports[fac.j - 1].psi);
        } else {
            // V^(j) shifted by s carries the eigenvector gamma^{-s h} psi^(j)
            vecs.push_back(rotate_vector(fac.rep, fac.shift.to_double(), gamma, table.reports[fac.j - 1].psi));
        }
    }
    CVector rhs = vecs.empty() ? CVector::Ones(1) : tensor_vector(vecs);

    out.beta = rhs.dot(lhs) / rhs.squaredNorm(); // Eigen dot conjugates the left arg
    out.residual = (lhs - out.beta * rhs).norm() / lhs.norm();
    out.residual = std::max(out.residual, out.off_component);
    out.mu = (2.0 * std::cos(alg.gamma_arg() * Di / 2.0)) * table.lambda[i - 1];
    return out;
}

// The full algebraic Psi-system for one algebra: morphisms, R-matrices, raw
// beta fits, and the rescaling of the psi^(i) that sets every beta_i = 1.
// For C_n the node i = n is not constructible (spin source); its slot in
// the rescale system is the U^(n) surrogate, pinned to scale 1.
struct PsiSystem {
    AlgebraData alg;
    LambdaTable table;                  // psi vectors rescaled in place
    std::vector<std::optional<Morphism>> m;  // index i-1, nullopt when skipped
    std::vector<CMatrix> R;             // index i-1
    std::vector<Complex> beta_raw;      // fitted before rescaling (0 where skipped)
    std::vector<double> residual;       // proportionality residual per i
    std::vector<int> checked;           // nodes actually verified
};

inline PsiSystem build_psi_system(const AlgebraData& alg) {
    PsiSystem ps;
    ps.alg = alg;
    ps.table = lambda_table(alg);
    const int n = alg.rank();
    ps.m.resize(n);
    ps.R.resize(n);
    ps.beta_raw.assign(n, 0.0);
    ps.residual.assign(n, 0.0);

    const bool cn = alg.g.family == Family::C;
    for (int i = 1; i <= n; ++i) {
        if (cn && i == n) continue; // spin source not constructed
        ps.R[i - 1] = R_isomorphism(alg, i);
        ps.m[i - 1] = build_m_i(alg, i);
        auto res = verify_algebraic_psi(alg, i, *ps.m[i - 1], ps.R[i - 1], ps.table);
        ps.beta_raw[i - 1] = res.beta;
        ps.residual[i - 1] = res.residual;
        ps.checked.push_back(i);
    }

    // Rescale psi^(j) -> c_j psi^(j) so that all beta_i become 1:
    //   2 log c_i - sum_{factors} log c_slot = -log beta_i.
    // Slots are the nodes 1..n (U^(n) slot pinned to c = 1 for C_n).
    const int rows = static_cast<int>(ps.checked.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, rows);
    CVector b(rows);
    for (int row = 0; row < rows; ++row) {
        const int i = ps.checked[row];
        A(row, i - 1) += 2.0;
        for (const auto& fac : psi_factor_list(alg, i))
            if (fac.j <= rows && !(cn && fac.j == n)) A(row, fac.j - 1) -= 1.0;
        b[row] = -std::log(ps.beta_raw[i - 1]);
    }
    CVector x = A.cast<Complex>().fullPivLu().solve(b);
    for (int row = 0; row < rows; ++row) {
        const int i = ps.checked[row];
        ps.table.reports[i - 1].psi *= std::exp(x[row]);
    }
    return ps;
}

// Re-fit the betas after rescaling; all should be 1 to numerical accuracy.
inline std::vector<Complex> psi_system_betas(const PsiSystem& ps) {
    std::vector<Complex> betas;
    for (int i : ps.checked) {
        auto res = verify_algebraic_psi(ps.alg, i, *ps.m[i - 1], ps.R[i - 1], ps.table);
        betas.push_back(res.beta);
    }
    return betas;
}

// Memoized Psi systems (one per algebra).
inline const PsiSystem& psi_system_cached(const AlgebraData& alg) {
    static std::map<std::string, PsiSystem> cache;
    auto it = cache.find(alg.g.str());
    if (it == cache.end()) it = cache.emplace(alg.g.str(), build_psi_system(alg)).first;
    return it->second;
}

} // namespace odeim
