#pragma once

#include <atomic>
#include <map>

#include "odeim/frobenius.hpp"
#include "odeim/util.hpp"

namespace odeim {

// omega^z and Omega^z with the natural phases
//   omega = e^{2 pi i /(h^vee (M+1))},  Omega = e^{2 pi i M/(M+1)}.
// Omega's angle exceeds pi for M > 1, so principal-branch powers would be
// wrong; the rotations always mean multiples of these angles.
inline Complex omega_pow(std::int64_t h_vee, double M, const Complex& z) {
    return std::exp(Complex(0, 1) * (2.0 * std::numbers::pi / (h_vee * (M + 1.0))) * z);
}
inline Complex Omega_pow(double M, const Complex& z) {
    return std::exp(Complex(0, 1) * (2.0 * std::numbers::pi * M / (M + 1.0)) * z);
}

// alpha_i(ell) for our convention alpha_i(h_k) = C_ik.
inline Complex simple_root_functional(const AlgebraData& alg, int i, const std::vector<Complex>& ell) {
    Complex out = 0;
    for (int k = 0; k < alg.rank(); ++k)
        out += static_cast<double>(alg.cartan.C[i - 1][k]) * ell[k];
    return out;
}

// Genericity filter for ell: regular (no simple-root functional near zero),
// inside the dual fundamental chamber (so w_ell = id), and non-resonant in
// every listed representation.
inline bool ell_generic(const AlgebraData& alg, const std::vector<Complex>& ell,
                        const std::vector<int>& nodes, double chamber_tol = 1e-6,
                        double resonance_tol = 1e-4) {
    for (int i = 1; i <= alg.rank(); ++i) {
        const Complex a = simple_root_functional(alg, i, ell);
        if (a.real() < chamber_tol) return false;
    }
    for (int i : nodes) {
        const MatrixRep& rep = fundamental_rep_cached(alg, i);
        if (exponents_resonant(frobenius_exponents(rep, ell), resonance_tol)) return false;
    }
    return true;
}

// Seeded generic draw: coefficients from [lo, hi), retried through the filter.
inline std::vector<Complex> draw_generic_ell(const AlgebraData& alg, std::uint64_t seed,
                                             const std::vector<int>& nodes, double lo = 0.08,
                                             double hi = 0.45) {
    SplitMix64 rng(seed * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
    for (int attempt = 0; attempt < 4096; ++attempt) {
        std::vector<Complex> ell(alg.rank());
        for (auto& c : ell) c = Complex(rng.uniform(lo, hi), 0);
        if (ell_generic(alg, ell, nodes)) return ell;
    }
    throw std::runtime_error("draw_generic_ell: no generic draw found");
}

// beta_j = w_ell(omega_j)(ell + h) and theta_i = w_ell(alpha_i)(ell + h),
// read off the chi / phi directions (w_ell = id here: highest weight and
// omega_i - alpha_i).
struct WeightFunctionals {
    std::vector<Complex> beta;   // per j in I
    std::vector<Complex> theta;  // per i in I
    double lemma_residual = 0;   // max_i |D_i theta_i - sum_j Cbar_ij beta_j|
};

inline Complex ell_plus_h_eigenvalue(const MatrixRep& rep, const std::vector<Complex>& ell, int b) {
    Complex out = rep.grading_wt[b].to_double();
    for (int i = 0; i < rep.n(); ++i) out += ell[i] * static_cast<double>(rep.weights[b][i]);
    return out;
}

inline WeightFunctionals weight_functionals(const AlgebraData& alg, const std::vector<Complex>& ell) {
    WeightFunctionals wf;
    const int n = alg.rank();
    for (int j = 1; j <= n; ++j) {
        const MatrixRep& rep = fundamental_rep_cached(alg, j);
        const int hw = rep.highest_weight_index();
        wf.beta.push_back(ell_plus_h_eigenvalue(rep, ell, hw));

        std::vector<std::int64_t> w = rep.weights[hw];
        for (int k = 0; k < n; ++k) w[k] -= alg.cartan.C[j - 1][k];
        auto idxs = rep.weight_indices(w);
        if (idxs.size() != 1) throw std::logic_error("weight_functionals: omega_i - alpha_i not simple");
        wf.theta.push_back(wf.beta.back() - ell_plus_h_eigenvalue(rep, ell, idxs[0]));
    }
    for (int i = 1; i <= n; ++i) {
        Complex rhs = 0;
        for (int j = 1; j <= n; ++j) rhs += alg.cartan.C_bar[i - 1][j - 1].to_double() * wf.beta[j - 1];
        const Complex lhs = alg.D_of(i).to_double() * wf.theta[i - 1];
        wf.lemma_residual = std::max(wf.lemma_residual, std::abs(lhs - rhs));
    }
    return wf;
}

// Q-function evaluator for one algebra / M / ell: connection contexts and
// extraction data per node, with memoized samples.
class QPipeline {
public:
    QPipeline(const AlgebraData& alg, const Rational& M, std::vector<Complex> ell,
              double x0 = 0.5, double rtol = 1e-10)
        : alg_(alg), M_(M), ell_(std::move(ell)), x0_(x0) {
        const PsiSystem& ps = psi_system_cached(alg_);
        for (int i : ps.checked) {
            const MatrixRep& rep = fundamental_rep_cached(alg_, i);
            auto cx = make_context(alg_, rep, M_, ell_, ps.table.reports[i - 1].psi, ps.table.lambda[i - 1]);
            cx.rtol = rtol;
            contexts_.emplace(i, std::move(cx));
            extractions_.emplace(i, default_extraction(alg_, i, *ps.m[i - 1]));
        }
        wf_ = weight_functionals(alg_, ell_);
    }

    const AlgebraData& alg() const { return alg_; }
    double M() const { return M_.to_double(); }
    const std::vector<Complex>& ell() const { return ell_; }
    const WeightFunctionals& functionals() const { return wf_; }
    bool has_node(int i) const { return contexts_.count(i) > 0; }
    const ConnectionContext& context(int i) const { return contexts_.at(i); }

    QSample sample(int i, const Complex& E) const {
        const auto key = std::make_tuple(i, E.real(), E.imag());
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        QSample qs = extract_q(contexts_.at(i), extractions_.at(i), E, x0_);
        std::lock_guard<std::mutex> lock(mu_);
        cache_.emplace(key, qs);
        return qs;
    }

    Complex Q(int i, const Complex& E) const { return sample(i, E).Q; }
    Complex Qt(int i, const Complex& E) const { return sample(i, E).Qt; }

private:
    AlgebraData alg_;
    Rational M_;
    std::vector<Complex> ell_;
    double x0_;
    std::map<int, ConnectionContext> contexts_;
    std::map<int, QExtraction> extractions_;
    WeightFunctionals wf_;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<int, double, double>, QSample> cache_;
};

// QQ~-system residual at one (i, E):
//   prod_{j,l} Q^(j)(Omega^{(B_ij-1-2l)/2r} E)
//     = omega^{D_i theta_i / 2} Q^(i)(Omega^{D_i/2}E) Q~^(i)(Omega^{-D_i/2}E)
//     - omega^{-D_i theta_i / 2} Q^(i)(Omega^{-D_i/2}E) Q~^(i)(Omega^{D_i/2}E).
struct QQResult {
    Complex lhs = 0, rhs = 0;
    double residual = 0; // |lhs-rhs| / max(|lhs|,|rhs|)
};

inline QQResult qq_residual(const QPipeline& qp, int i, const Complex& E) {
    const auto& alg = qp.alg();
    const double M = qp.M();
    const double Di = alg.D_of(i).to_double();
    const int r = alg.fold.r;

    QQResult out;
    out.lhs = 1.0;
    for (int j = 1; j <= alg.rank(); ++j) {
        const std::int64_t Bij = alg.cartan.B[i - 1][j - 1];
        for (std::int64_t l = 0; l < Bij; ++l) {
            const double shift = static_cast<double>(Bij - 1 - 2 * l) / (2.0 * r);
            out.lhs *= qp.Q(j, Omega_pow(M, shift) * E);
        }
    }
    const Complex th = qp.functionals().theta[i - 1];
    const Complex w_plus = omega_pow(alg.h_vee(), M, Di * th / 2.0);
    out.rhs = w_plus * qp.Q(i, Omega_pow(M, Di / 2.0) * E) * qp.Qt(i, Omega_pow(M, -Di / 2.0) * E) -
              (1.0 / w_plus) * qp.Q(i, Omega_pow(M, -Di / 2.0) * E) * qp.Qt(i, Omega_pow(M, Di / 2.0) * E);
    out.residual = std::abs(out.lhs - out.rhs) / std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-300});
    return out;
}

// Bethe Ansatz product at a zero E* of Q^(i):
//   prod_j Omega^{Cbar_ij beta-bar_j} Q^(j)(Omega^{Cbar_ij/2}E*) / Q^(j)(Omega^{-Cbar_ij/2}E*) = -1,
// beta-bar_j = beta_j / (M h^vee). Returns product + 1 and the hypothesis
// check (non-vanishing of the shifted product).
struct BaeResult {
    Complex product = 0;
    double residual = 0;       // |product + 1|
    bool hypothesis_ok = true; // Thm 6.4 non-degeneracy at E*
    double hypothesis_min = 0; // smallest |Q| entering the hypothesis product
};

inline BaeResult bae_residual(const QPipeline& qp, int i, const Complex& Estar) {
    const auto& alg = qp.alg();
    const double M = qp.M();
    const double Mh = M * static_cast<double>(alg.h_vee());
    const int r = alg.fold.r;
    const double Di = alg.D_of(i).to_double();

    BaeResult out;
    out.hypothesis_min = 1e300;
    for (int j = 1; j <= alg.rank(); ++j) {
        const std::int64_t Bij = alg.cartan.B[i - 1][j - 1];
        for (std::int64_t l = 0; l < Bij; ++l) {
            const double shift = static_cast<double>(Bij - 1 - 2 * l) / (2.0 * r) - Di / 2.0;
            const double q = std::abs(qp.Q(j, Omega_pow(M, shift) * Estar));
            out.hypothesis_min = std::min(out.hypothesis_min, q);
        }
    }
    if (out.hypothesis_min < 1e-10) out.hypothesis_ok = false;

    out.product = 1.0;
    for (int j = 1; j <= alg.rank(); ++j) {
        const double cbar = alg.cartan.C_bar[i - 1][j - 1].to_double();
        if (cbar == 0.0) continue;
        const Complex beta_bar = qp.functionals().beta[j - 1] / Mh;
        out.product *= Omega_pow(M, cbar * beta_bar);
        out.product *= qp.Q(j, Omega_pow(M, cbar / 2.0) * Estar);
        out.product /= qp.Q(j, Omega_pow(M, -cbar / 2.0) * Estar);
    }
    out.residual = std::abs(out.product + 1.0);
    return out;
}

// --- zero finding by the argument principle -------------------------------

struct Zero {
    Complex E;
    double newton_residual = 0; // |Q| at the refined zero / local scale
    int multiplicity = 1;
};

struct ZeroSearchConfig {
    double re_lo = 0.5, re_hi = 40.0;
    double im_lo = -4.0, im_hi = 4.0;
    int max_depth = 11;
    int boundary_samples = 32;
    double newton_cell = 0.35; // refine when the cell diagonal is below this
    int newton_iters = 40;
};

namespace detail {

// Winding number of Q around a rectangle boundary with adaptive phase
// tracking. Returns false if the phase cannot be resolved (zero too close
// to the boundary).
template <class F>
inline bool winding_number(const F& f, Complex lo, Complex hi, int samples, int* out) {
    std::vector<Complex> pts;
    auto push_edge = [&](Complex a, Complex b) {
        for (int k = 0; k < samples; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / samples));
    };
    const Complex c1(lo.real(), lo.imag()), c2(hi.real(), lo.imag()), c3(hi.real(), hi.imag()),
        c4(lo.real(), hi.imag());
    push_edge(c1, c2);
    push_edge(c2, c3);
    push_edge(c3, c4);
    push_edge(c4, c1);
    pts.push_back(c1);

    std::vector<Complex> vals(pts.size());
    std::atomic<bool> dead{false};
    parallel_for(static_cast<int>(pts.size()), [&](int k) {
        vals[k] = f(pts[k]);
        if (!(std::abs(vals[k]) > 0)) dead = true;
    });
    if (dead) return false;

    double total = 0;
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        Complex za = pts[k], zb = pts[k + 1];
        Complex fa = vals[k], fb = vals[k + 1];
        // bisect until each hop is a small phase step
        struct Item { Complex za, zb, fa, fb; int depth; };
        std::vector<Item> stack{{za, zb, fa, fb, 0}};
        while (!stack.empty()) {
            Item it = stack.back();
            stack.pop_back();
            const double d = std::arg(it.fb / it.fa);
            if (std::abs(d) < 1.2 || it.depth >= 12) {
                if (std::abs(d) >= 2.6) return false; // unresolved jump
                total += d;
                continue;
            }
            const Complex zm = 0.5 * (it.za + it.zb);
            const Complex fm = f(zm);
            if (!(std::abs(fm) > 0)) return false;
            stack.push_back({it.za, zm, it.fa, fm, it.depth + 1});
            stack.push_back({zm, it.zb, fm, it.fb, it.depth + 1});
        }
    }
    const double w = total / (2.0 * std::numbers::pi);
    if (std::abs(w - std::round(w)) > 0.25) return false;
    *out = static_cast<int>(std::round(w));
    return true;
}

} // namespace detail

// Locate zeros of f in the rectangle by recursive winding-number cells with
// Newton refinement (centred finite-difference derivative).
template <class F>
inline std::vector<Zero> find_zeros(const F& f, const ZeroSearchConfig& cfg) {
    std::vector<Zero> zeros;
    struct Cell { Complex lo, hi; int depth; };
    std::vector<Cell> work{{Complex(cfg.re_lo, cfg.im_lo), Complex(cfg.re_hi, cfg.im_hi), 0}};

    auto newton = [&](Complex e0, int mult) {
        const double scale = std::max(1.0, std::abs(e0));
        Complex e = e0;
        for (int it = 0; it < cfg.newton_iters; ++it) {
            const double h = 1e-5 * scale;
            const Complex q0 = f(e);
            const Complex dq = (f(e + h) - f(e - h)) / (2.0 * h);
            if (std::abs(dq) == 0) break;
            const Complex step = q0 / dq;
            e -= step;
            if (std::abs(step) < 1e-12 * scale) break;
        }
        Zero z;
        z.E = e;
        const double h = 1e-4 * scale;
        const double local = std::max({std::abs(f(e + h)), std::abs(f(e - h)), 1e-300});
        z.newton_residual = std::abs(f(e)) / local;
        z.multiplicity = mult;
        return z;
    };

    while (!work.empty()) {
        Cell c = work.back();
        work.pop_back();
        int w = 0;
        bool ok = detail::winding_number(f, c.lo, c.hi, cfg.boundary_samples, &w);
        if (!ok) {
            if (c.depth >= cfg.max_depth) continue; // budget exhausted near a boundary zero
            // nudge the split to move the boundary off the zero
            const Complex mid = 0.5 * (c.lo + c.hi) + Complex(0.03, 0.017) * (c.hi - c.lo);
            work.push_back({c.lo, Complex(mid.real(), mid.imag()), c.depth + 1});
            work.push_back({Complex(mid.real(), c.lo.imag()), Complex(c.hi.real(), mid.imag()), c.depth + 1});
            work.push_back({Complex(c.lo.real(), mid.imag()), Complex(mid.real(), c.hi.imag()), c.depth + 1});
            work.push_back({Complex(mid.real(), mid.imag()), c.hi, c.depth + 1});
            continue;
        }
        if (w == 0) continue;
        const double diag = std::abs(c.hi - c.lo);
        if ((w == 1 && diag < cfg.newton_cell * std::max(1.0, std::abs(c.hi + c.lo) / 2.0)) ||
            c.depth >= cfg.max_depth) {
            zeros.push_back(newton(0.5 * (c.lo + c.hi), w));
            continue;
        }
        const Complex mid = 0.5 * (c.lo + c.hi) + Complex(0.031, 0.017) * (c.hi - c.lo);
        work.push_back({c.lo, mid, c.depth + 1});
        work.push_back({Complex(mid.real(), c.lo.imag()), Complex(c.hi.real(), mid.imag()), c.depth + 1});
        work.push_back({Complex(c.lo.real(), mid.imag()), Complex(mid.real(), c.hi.imag()), c.depth + 1});
        work.push_back({mid, c.hi, c.depth + 1});
    }

    std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) {
        if (a.E.real() != b.E.real()) return a.E.real() < b.E.real();
        return a.E.imag() < b.E.imag();
    });
    // merge duplicates found through neighbouring cells
    std::vector<Zero> unique;
    for (const auto& z : zeros) {
        bool dup = false;
        for (const auto& u : unique)
            if (std::abs(u.E - z.E) < 1e-6 * std::max(1.0, std::abs(z.E))) dup = true;
        if (!dup) unique.push_back(z);
    }
    return unique;
}

// --- Weyl group machinery --------------------------------------------------

// Simple reflection s_i acting on a weight tuple (values on h_1..h_n):
// s_i(mu)_k = mu_k - mu_i C_ik.
inline std::vector<double> reflect_weight(const AlgebraData& alg, int i, std::vector<double> mu) {
    const double mi = mu[i - 1];
    for (int k = 0; k < alg.rank(); ++k) mu[k] -= mi * static_cast<double>(alg.cartan.C[i - 1][k]);
    return mu;
}

inline std::vector<std::int64_t> reflect_weight_int(const AlgebraData& alg, int i,
                                                    std::vector<std::int64_t> mu) {
    const std::int64_t mi = mu[i - 1];
    for (int k = 0; k < alg.rank(); ++k) mu[k] -= mi * alg.cartan.C[i - 1][k];
    return mu;
}

// Greedy chamber word for ell: repeatedly reflect at a simple root whose
// functional has negative real part; for regular ell the loop terminates
// and the returned word w satisfies: all alpha_i(w^{-1} ell) > 0.
inline std::vector<int> weyl_chamber(const AlgebraData& alg, std::vector<Complex> ell,
                                     double tol = 1e-10) {
    std::vector<int> word;
    for (int guard = 0; guard < 4096; ++guard) {
        int neg = 0;
        for (int i = 1; i <= alg.rank(); ++i) {
            const Complex a = simple_root_functional(alg, i, ell);
            if (std::abs(a.real()) < tol)
                throw std::invalid_argument("weyl_chamber: ell is not regular");
            if (a.real() < 0) { neg = i; break; }
        }
        if (neg == 0) return word;
        word.push_back(neg);
        // reflect ell: alpha_j(s_i ell) = alpha_j(ell) - C_ji alpha_i(ell)
        // realized on the coefficient vector via the dual action
        std::vector<Complex> next(alg.rank());
        // ell = sum ell_k h_k; s_i(h-coefficients): mu(h_k)-style tuples are
        // the weights; the coefficient vector transforms contragrediently:
        // alpha_j(next) = (s_i alpha_j)(ell).
        // Compute values v_j = alpha_j(ell), reflect, then solve back.
        std::vector<Complex> v(alg.rank());
        for (int j = 1; j <= alg.rank(); ++j) v[j - 1] = simple_root_functional(alg, j, ell);
        std::vector<Complex> vr(alg.rank());
        for (int j = 1; j <= alg.rank(); ++j)
            vr[j - 1] = v[j - 1] - static_cast<double>(alg.cartan.C[j - 1][neg - 1]) * v[neg - 1];
        // solve C^T next = vr  (v_j = sum_k C_jk next_k ... see note below)
        Eigen::MatrixXcd Cm(alg.rank(), alg.rank());
        for (int a2 = 0; a2 < alg.rank(); ++a2)
            for (int b2 = 0; b2 < alg.rank(); ++b2) Cm(a2, b2) = static_cast<double>(alg.cartan.C[a2][b2]);
        Eigen::VectorXcd rhs(alg.rank());
        for (int j = 0; j < alg.rank(); ++j) rhs[j] = vr[j];
        Eigen::VectorXcd sol = Cm.fullPivLu().solve(rhs);
        for (int k = 0; k < alg.rank(); ++k) next[k] = sol[k];
        ell = std::move(next);
    }
    throw std::runtime_error("weyl_chamber: did not terminate");
}

// Weyl-translated extraction for V^(i): chi along weight w(omega_i), phi
// along w(omega_i - alpha_i); z re-derived through m_i.
struct WeylExtraction {
    QExtraction qe;
    Complex beta;  // w-translated (ell+h)-eigenvalue on chi
    Complex theta; // difference of (ell+h)-eigenvalues chi - phi
};

inline WeylExtraction weyl_extraction(const AlgebraData& alg, int i, const std::vector<int>& word,
                                      const std::vector<Complex>& ell, const Morphism& m) {
    const MatrixRep& vi = fundamental_rep_cached(alg, i);
    std::vector<std::int64_t> w_chi(alg.rank(), 0), w_phi(alg.rank(), 0);
    w_chi[i - 1] = 1;
    for (int k = 0; k < alg.rank(); ++k) w_phi[k] = w_chi[k] - alg.cartan.C[i - 1][k];
    // apply the word right-to-left: w = s_{a1} s_{a2} ... acting on weights
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        w_chi = reflect_weight_int(alg, *it, w_chi);
        w_phi = reflect_weight_int(alg, *it, w_phi);
    }
    auto ci = vi.weight_indices(w_chi);
    auto pi = vi.weight_indices(w_phi);
    if (ci.size() != 1 || pi.size() != 1)
        throw std::invalid_argument("weyl_extraction: translated weight not simple");
    WeylExtraction we;
    we.qe.chi_index = ci[0];
    we.qe.phi_index = pi[0];

    CVector echi = CVector::Zero(vi.dim), ephi = CVector::Zero(vi.dim);
    echi[we.qe.chi_index] = 1.0;
    ephi[we.qe.phi_index] = 1.0;
    double off = 0;
    CVector img = m.apply(wedge2_vector(m.source, echi, ephi), &off);
    // target coordinate: product of the w-translated chi indices per factor
    int t0 = 0;
    for (const auto& fac : psi_factor_list(alg, i)) {
        const MatrixRep& vj = fundamental_rep_cached(alg, fac.j);
        std::vector<std::int64_t> wj(alg.rank(), 0);
        wj[fac.j - 1] = 1;
        for (auto it = word.rbegin(); it != word.rend(); ++it) wj = reflect_weight_int(alg, *it, wj);
        auto idx = vj.weight_indices(wj);
        if (idx.size() != 1) throw std::invalid_argument("weyl_extraction: factor weight not simple");
        t0 = t0 * fac.rep.dim + idx[0];
    }
    const Complex coeff = img[t0];
    if (std::abs(coeff) < 1e-9 || off > 1e-8)
        throw std::invalid_argument("weyl_extraction: m_i entry unavailable for this word");
    we.qe.z = 1.0 / coeff;
    we.beta = ell_plus_h_eigenvalue(vi, ell, we.qe.chi_index);
    we.theta = we.beta - ell_plus_h_eigenvalue(vi, ell, we.qe.phi_index);
    return we;
}

} // namespace odeim
