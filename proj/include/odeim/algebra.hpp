#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "odeim/rational.hpp"

namespace odeim {

using Complex = std::complex<double>;

enum class Family : char { A = 'A', B = 'B', C = 'C', D = 'D', E = 'E', F = 'F', G = 'G' };

// A simple Lie algebra g, named by family and rank.
struct AlgebraLabel {
    Family family;
    int rank;

    std::string str() const { return std::string(1, static_cast<char>(family)) + std::to_string(rank); }

    friend bool operator==(const AlgebraLabel&, const AlgebraLabel&) = default;
};

inline bool rank_valid(Family f, int n) {
    switch (f) {
        case Family::A: return n >= 1;
        case Family::B: return n >= 3;
        case Family::C: return n >= 2;
        case Family::D: return n >= 4;
        case Family::E: return n >= 6 && n <= 8;
        case Family::F: return n == 4;
        case Family::G: return n == 2;
    }
    return false;
}

inline AlgebraLabel make_label(Family f, int n) {
    if (!rank_valid(f, n))
        throw std::invalid_argument("unsupported algebra label " +
                                    std::string(1, static_cast<char>(f)) + std::to_string(n));
    return AlgebraLabel{f, n};
}

// Parses "B3", "g2", "A 5" and the like.
inline AlgebraLabel parse_label(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.size() < 2) throw std::invalid_argument("cannot parse algebra label '" + s + "'");
    char f = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    if (f < 'A' || f > 'G') throw std::invalid_argument("cannot parse algebra label '" + s + "'");
    int n = std::stoi(t.substr(1));
    return make_label(static_cast<Family>(f), n);
}

inline bool simply_laced(const AlgebraLabel& g) {
    return g.family == Family::A || g.family == Family::D || g.family == Family::E;
}

using IntMatrix = std::vector<std::vector<std::int64_t>>;

// Cartan matrix of a simply-laced algebra, nodes numbered as in the usual
// ADE diagrams: A_n a chain 1..n; D_n a chain 1..n-1 with node n attached to
// n-2; E_n a chain skipping the branch node, which hangs off the third
// (E6), fourth (E7) or fifth (E8) chain node.
inline IntMatrix simply_laced_cartan(const AlgebraLabel& g) {
    if (!simply_laced(g)) throw std::invalid_argument("simply_laced_cartan: " + g.str() + " is not ADE");
    const int n = g.rank;
    std::vector<std::pair<int, int>> edges;
    auto chain = [&edges](std::vector<int> nodes) {
        for (size_t k = 0; k + 1 < nodes.size(); ++k) edges.emplace_back(nodes[k], nodes[k + 1]);
    };
    switch (g.family) {
        case Family::A: {
            std::vector<int> c(n);
            for (int i = 0; i < n; ++i) c[i] = i + 1;
            chain(c);
            break;
        }
        case Family::D: {
            std::vector<int> c(n - 1);
            for (int i = 0; i < n - 1; ++i) c[i] = i + 1;
            chain(c);
            edges.emplace_back(n - 2, n);
            break;
        }
        case Family::E: {
            if (n == 6) { chain({1, 2, 3, 5, 6}); edges.emplace_back(3, 4); }
            if (n == 7) { chain({1, 2, 3, 4, 6, 7}); edges.emplace_back(4, 5); }
            if (n == 8) { chain({1, 2, 3, 4, 5, 7, 8}); edges.emplace_back(5, 6); }
            break;
        }
        default: break;
    }
    IntMatrix C(n, std::vector<std::int64_t>(n, 0));
    for (int i = 0; i < n; ++i) C[i][i] = 2;
    for (auto [a, b] : edges) { C[a - 1][b - 1] = -1; C[b - 1][a - 1] = -1; }
    return C;
}

inline IntMatrix incidence_from_cartan(const IntMatrix& C) {
    IntMatrix B(C.size(), std::vector<std::int64_t>(C.size(), 0));
    for (size_t i = 0; i < C.size(); ++i)
        for (size_t j = 0; j < C.size(); ++j) B[i][j] = (i == j ? 2 : 0) - C[i][j];
    return B;
}

// Langlands folding data: the pair (g~, sigma) with r = ord(sigma), the
// sigma-orbits on the nodes of g~, the orbit representatives I, the
// symmetrizer D_i = |orbit(i)|/r and the dual Coxeter number of g^(1).
struct FoldingData {
    AlgebraLabel g;           // the algebra being folded to
    AlgebraLabel tilde_label; // simply-laced g~
    int r = 1;                // order of sigma
    std::vector<int> sigma;   // permutation on {1..rank(g~)}, 1-based values, index 0 unused
    std::vector<std::vector<int>> orbits; // each sorted, ordered by min element
    std::vector<int> rep_of_orbit;        // I: orbit representatives (minima), size rank(g)
    std::vector<Rational> D;              // D_i per i in I
    std::int64_t dual_coxeter = 0;        // h^vee

    int tilde_rank() const { return tilde_label.rank; }
    int orbit_size(int i) const { // i is 1-based node of g~
        for (const auto& orb : orbits)
            if (std::find(orb.begin(), orb.end(), i) != orb.end()) return static_cast<int>(orb.size());
        throw std::out_of_range("orbit_size: bad node");
    }
};

inline std::int64_t dual_coxeter_number(const AlgebraLabel& g) {
    const std::int64_t n = g.rank;
    switch (g.family) {
        case Family::A: return n + 1;
        case Family::B: return 2 * n - 1;
        case Family::C: return n + 1;
        case Family::D: return 2 * n - 2;
        case Family::E: return 3 * (n * n - 11 * n + 34);
        case Family::F: return 9;
        case Family::G: return 4;
    }
    throw std::logic_error("dual_coxeter_number");
}

inline FoldingData langlands_fold(const AlgebraLabel& g) {
    if (!rank_valid(g.family, g.rank)) throw std::invalid_argument("langlands_fold: bad label " + g.str());
    FoldingData fd;
    fd.g = g;
    fd.dual_coxeter = dual_coxeter_number(g);
    const int n = g.rank;

    int tn = 0;
    switch (g.family) {
        case Family::B: fd.tilde_label = {Family::A, 2 * n - 1}; fd.r = 2; break;
        case Family::C: fd.tilde_label = {Family::D, n + 1};     fd.r = 2; break;
        case Family::F: fd.tilde_label = {Family::E, 6};         fd.r = 2; break;
        case Family::G: fd.tilde_label = {Family::D, 4};         fd.r = 3; break;
        default:        fd.tilde_label = g;                      fd.r = 1; break;
    }
    tn = fd.tilde_label.rank;

    fd.sigma.assign(tn + 1, 0);
    for (int i = 1; i <= tn; ++i) fd.sigma[i] = i;
    switch (g.family) {
        case Family::B:
            for (int i = 1; i <= tn; ++i) fd.sigma[i] = 2 * n - i;
            break;
        case Family::C:
            fd.sigma[n] = n + 1;
            fd.sigma[n + 1] = n;
            break;
        case Family::F:
            fd.sigma[1] = 6; fd.sigma[6] = 1;
            fd.sigma[2] = 5; fd.sigma[5] = 2;
            break;
        case Family::G:
            fd.sigma[1] = 3; fd.sigma[3] = 4; fd.sigma[4] = 1;
            break;
        default: break;
    }

    std::vector<bool> seen(tn + 1, false);
    for (int i = 1; i <= tn; ++i) {
        if (seen[i]) continue;
        std::vector<int> orb;
        int j = i;
        do { orb.push_back(j); seen[j] = true; j = fd.sigma[j]; } while (j != i);
        std::sort(orb.begin(), orb.end());
        fd.orbits.push_back(orb);
    }
    std::sort(fd.orbits.begin(), fd.orbits.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (const auto& orb : fd.orbits) fd.rep_of_orbit.push_back(orb.front());
    if (static_cast<int>(fd.rep_of_orbit.size()) != n)
        throw std::logic_error("langlands_fold: orbit count disagrees with rank of " + g.str());
    for (const auto& orb : fd.orbits) fd.D.emplace_back(static_cast<std::int64_t>(orb.size()), fd.r);
    return fd;
}

using RatMatrix = std::vector<std::vector<Rational>>;

// Folded Cartan data: C from the row-sum over sigma-orbits, B likewise from
// the incidence matrix, and the symmetrized C_bar = D C.
struct CartanData {
    IntMatrix C;
    IntMatrix B;
    RatMatrix C_bar;
    std::vector<Rational> D;
};

inline CartanData fold_cartan(const IntMatrix& Ct, const FoldingData& fold) {
    const int tn = static_cast<int>(Ct.size());
    if (tn != fold.tilde_rank()) throw std::invalid_argument("fold_cartan: size mismatch");
    for (int i = 1; i <= tn; ++i)
        for (int j = 1; j <= tn; ++j)
            if (Ct[fold.sigma[i] - 1][fold.sigma[j] - 1] != Ct[i - 1][j - 1])
                throw std::invalid_argument("fold_cartan: sigma is not a diagram automorphism");

    const int n = static_cast<int>(fold.rep_of_orbit.size());
    CartanData cd;
    cd.D = fold.D;
    cd.C.assign(n, std::vector<std::int64_t>(n, 0));
    for (int a = 0; a < n; ++a) {
        const int i = fold.rep_of_orbit[a];
        for (int b = 0; b < n; ++b) {
            std::int64_t s = 0;
            for (int j : fold.orbits[b]) s += Ct[i - 1][j - 1];
            cd.C[a][b] = s;
        }
    }
    cd.B = incidence_from_cartan(cd.C);
    cd.C_bar.assign(n, std::vector<Rational>(n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) cd.C_bar[a][b] = cd.D[a] * Rational(cd.C[a][b]);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (cd.C_bar[a][b] != cd.C_bar[b][a])
                throw std::logic_error("fold_cartan: DC is not symmetric");
    return cd;
}

// Good vertices of the g~ diagram with respect to sigma: i such that no two
// sigma-related nodes are both neighbours of i. Returns 1-based node ids.
inline std::vector<int> good_vertices(const FoldingData& fold, const IntMatrix& Bt) {
    const int tn = fold.tilde_rank();
    std::vector<int> good;
    for (int i = 1; i <= tn; ++i) {
        bool ok = true;
        for (int j = 1; j <= tn && ok; ++j) {
            if (fold.sigma[j] == j) continue;
            if (Bt[i - 1][j - 1] != 0 && Bt[i - 1][fold.sigma[j] - 1] != 0) ok = false;
        }
        if (ok) good.push_back(i);
    }
    return good;
}

// Bipartition p and the evaluation twists k_i on the nodes of g~:
// p(1)=0 and p alternates along edges; k_1=0 and k_j = k_i + s_i D_i / 2
// across every edge whose endpoint i is good.
struct TwistAssignment {
    std::vector<int> p;        // 1-based, values 0/1
    std::vector<int> s;        // s_i = (-1)^p(i)
    std::vector<Rational> k;   // 1-based twists
    std::vector<int> good;     // good vertices
};

inline TwistAssignment twist_assignment(const FoldingData& fold) {
    const int tn = fold.tilde_rank();
    const IntMatrix Ct = simply_laced_cartan(fold.tilde_label);
    const IntMatrix Bt = incidence_from_cartan(Ct);

    TwistAssignment ta;
    ta.good = good_vertices(fold, Bt);
    ta.p.assign(tn + 1, -1);
    ta.p[1] = 0;
    std::vector<int> stack{1};
    while (!stack.empty()) {
        int i = stack.back();
        stack.pop_back();
        for (int j = 1; j <= tn; ++j) {
            if (Bt[i - 1][j - 1] == 0) continue;
            if (ta.p[j] == -1) { ta.p[j] = 1 - ta.p[i]; stack.push_back(j); }
            else if (ta.p[j] == ta.p[i])
                throw std::logic_error("twist_assignment: diagram is not bipartite");
        }
    }
    ta.s.assign(tn + 1, 0);
    for (int i = 1; i <= tn; ++i) ta.s[i] = ta.p[i] == 0 ? 1 : -1;

    std::vector<bool> is_good(tn + 1, false);
    for (int i : ta.good) is_good[i] = true;
    auto Di = [&fold](int i) { return Rational(fold.orbit_size(i), fold.r); };

    // Propagate k over the constraint graph: every edge {i,j} with i good
    // imposes k_j - k_i = s_i D_i / 2, usable in either direction.
    std::vector<std::optional<Rational>> k(tn + 1);
    k[1] = Rational(0);
    bool progress = true;
    while (progress) {
        progress = false;
        for (int i = 1; i <= tn; ++i) {
            if (!is_good[i]) continue;
            const Rational step = Rational(ta.s[i]) * Di(i) / Rational(2);
            for (int j = 1; j <= tn; ++j) {
                if (Bt[i - 1][j - 1] == 0) continue;
                if (k[i] && !k[j]) { k[j] = *k[i] + step; progress = true; }
                else if (!k[i] && k[j]) { k[i] = *k[j] - step; progress = true; }
            }
        }
    }
    for (int i = 1; i <= tn; ++i) {
        if (!k[i]) throw std::logic_error("twist_assignment: node " + std::to_string(i) + " unreached");
        if (!is_good[i]) continue;
        const Rational step = Rational(ta.s[i]) * Di(i) / Rational(2);
        for (int j = 1; j <= tn; ++j)
            if (Bt[i - 1][j - 1] != 0 && *k[j] != *k[i] + step)
                throw std::logic_error("twist_assignment: inconsistent propagation");
    }
    ta.k.assign(tn + 1, Rational(0));
    for (int i = 1; i <= tn; ++i) ta.k[i] = *k[i];
    for (int i = 1; i <= tn; ++i)
        if (ta.k[i] != ta.k[fold.sigma[i]])
            throw std::logic_error("twist_assignment: k not sigma-invariant");
    return ta;
}

// Both sides of the twist-difference identity
//   k_j - k_i - s_i D_i/2 = -s_j (B_ij - 1) / (2r)
// for i,j in I with B_ij != 0.
inline std::pair<Rational, Rational> lemma_kdiff(const FoldingData& fold, const CartanData& cd,
                                                 const TwistAssignment& ta, int a, int b) {
    const int n = static_cast<int>(fold.rep_of_orbit.size());
    if (a < 1 || a > n || b < 1 || b > n) throw std::out_of_range("lemma_kdiff: index");
    if (cd.B[a - 1][b - 1] == 0) throw std::invalid_argument("lemma_kdiff: B_ij = 0");
    const int i = fold.rep_of_orbit[a - 1], j = fold.rep_of_orbit[b - 1];
    Rational lhs = ta.k[j] - ta.k[i] - Rational(ta.s[i]) * fold.D[a - 1] / Rational(2);
    Rational rhs = -Rational(ta.s[j]) * Rational(cd.B[a - 1][b - 1] - 1, 2 * fold.r);
    return {lhs, rhs};
}

// omega = e^{2 pi i / (h^vee (M+1))} and Omega = e^{2 pi i M/(M+1)} = omega^{h^vee M}.
inline std::pair<Complex, Complex> bae_parameters(double M, std::int64_t h_vee) {
    if (M <= 0) throw std::invalid_argument("bae_parameters: M must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    Complex omega = std::polar(1.0, two_pi / (static_cast<double>(h_vee) * (M + 1.0)));
    Complex Omega = std::polar(1.0, two_pi * M / (M + 1.0));
    return {omega, Omega};
}

// Bundle of everything the downstream pipelines need about one algebra.
struct AlgebraData {
    AlgebraLabel g;
    FoldingData fold;
    IntMatrix tilde_cartan;
    TwistAssignment twists;
    CartanData cartan;

    int rank() const { return g.rank; }
    std::int64_t h_vee() const { return fold.dual_coxeter; }
    double gamma_arg() const { return 2.0 * std::numbers::pi / static_cast<double>(h_vee()); }
    Complex gamma(double power = 1.0) const { return std::polar(1.0, gamma_arg() * power); }
    // Twist k_i for the representative node of orbit a (1-based a in I).
    Rational k_of(int a) const { return twists.k[fold.rep_of_orbit[a - 1]]; }
    Rational D_of(int a) const { return fold.D[a - 1]; }
};

inline AlgebraData algebra_data(const AlgebraLabel& g) {
    AlgebraData ad;
    ad.g = g;
    ad.fold = langlands_fold(g);
    ad.tilde_cartan = simply_laced_cartan(ad.fold.tilde_label);
    ad.twists = twist_assignment(ad.fold);
    ad.cartan = fold_cartan(ad.tilde_cartan, ad.fold);
    return ad;
}

inline AlgebraData algebra_data(const std::string& name) { return algebra_data(parse_label(name)); }

} // namespace odeim
