#include <catch2/catch_amalgamated.hpp>

#include "odeim/rep.hpp"

using namespace odeim;
using Catch::Approx;

namespace {
double cnorm(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }
}

TEST_CASE("A_{2n-1}^(2) standard rep generators") {
    auto alg = algebra_data("B3");
    auto rep = standard_rep_A2odd(alg, Rational(0));
    REQUIRE(rep.dim == 6);

    // e_1 = E_12 + E_56, e_3 = E_34, e_0 = (E_51 + E_62)/2
    CMatrix e1 = CMatrix::Zero(6, 6);
    e1(0, 1) = 1; e1(4, 5) = 1;
    CHECK(cnorm(rep.e[1] - e1) == 0.0);
    CMatrix e3 = CMatrix::Zero(6, 6);
    e3(2, 3) = 1;
    CHECK(cnorm(rep.e[3] - e3) == 0.0);
    CMatrix e0 = CMatrix::Zero(6, 6);
    e0(4, 0) = 0.5; e0(5, 1) = 0.5;
    CHECK(cnorm(rep.e[0] - e0) < 1e-15);

    auto rp = check_chevalley(rep);
    CHECK(rp.max_residual < 1e-12);
    CHECK(rp.grading_residual < 1e-12);

    // grading = diag(5/2, 3/2, ..., -5/2)
    for (int b = 0; b < 6; ++b)
        CHECK(rep.grading_wt[b] == Rational(5 - 2 * b, 2));

    // half-integer twist flips only e_0
    auto rep2 = standard_rep_A2odd(alg, Rational(1, 2));
    CHECK(cnorm(rep2.e[0] + rep.e[0]) < 1e-14);
    for (int i = 1; i <= 3; ++i) CHECK(cnorm(rep2.e[i] - rep.e[i]) == 0.0);

    // psi1 = 2(u_1+...+u_5) + u_6 satisfies Lambda psi = psi
    CVector psi(6);
    psi << 2, 2, 2, 2, 2, 1;
    CHECK((rep.Lambda() * psi - psi).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("D_{n+1}^(2) standard rep") {
    SECTION("C2: dim 6, eps = 1, full relations") {
        auto alg = algebra_data("C2");
        auto rep = standard_rep_D2(alg, Rational(0));
        REQUIRE(rep.dim == 6);
        CHECK(rep.e[0].cwiseAbs().maxCoeff() > 0);
        CHECK(rep.e[0].imag().cwiseAbs().maxCoeff() < 1e-15); // eps_2 = 1: real
        auto rp = check_chevalley(rep);
        CHECK(rp.max_residual < 1e-12);
        CHECK(rp.grading_residual < 1e-12);
    }
    SECTION("C3: eps = i makes e_0 non-real") {
        auto alg = algebra_data("C3");
        auto rep = standard_rep_D2(alg, Rational(0));
        REQUIRE(rep.dim == 8);
        CHECK(rep.e[0].imag().cwiseAbs().maxCoeff() > 0.1);
        auto rp = check_chevalley(rep);
        CHECK(rp.max_residual < 1e-12);
    }
    SECTION("o_{2n+2} membership A S + S A^at = 0 for every generator") {
        for (const char* name : {"C2", "C3", "C4"}) {
            auto alg = algebra_data(name);
            auto rep = standard_rep_D2(alg, Rational(0));
            const int N = rep.dim;
            CMatrix S = CMatrix::Zero(N, N);
            for (int k = 1; k <= N / 2; ++k) {
                double sgn = (k % 2 == 1) ? 1.0 : -1.0;
                S(k - 1, k - 1) = sgn;
                S(N - k, N - k) = sgn;
            }
            auto at = [N](const CMatrix& A) {
                CMatrix B(N, N);
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) B(i, j) = A(N - 1 - j, N - 1 - i);
                return B;
            };
            for (size_t g = 0; g < rep.e.size(); ++g) {
                INFO(name << " generator " << g);
                CHECK(cnorm(rep.e[g] * S + S * at(rep.e[g])) < 1e-12);
                CHECK(cnorm(rep.f[g] * S + S * at(rep.f[g])) < 1e-12);
                CHECK(cnorm(rep.h[g] * S + S * at(rep.h[g])) < 1e-12);
            }
        }
    }
    SECTION("psi1 from the explicit formula is a fixed vector of Lambda") {
        for (const char* name : {"C2", "C3", "C4"}) {
            auto alg = algebra_data(name);
            auto rep = standard_rep_D2(alg, Rational(0));
            const int n = alg.rank();
            const Complex eps = (n % 2 == 0) ? Complex(1, 0) : Complex(0, 1);
            CVector psi = CVector::Zero(rep.dim);
            for (int k = 1; k <= n; ++k) {
                psi[k - 1] = 1.0;
                psi[rep.dim - k] = 1.0; // u_{k'}
            }
            psi[n] = (eps + 1.0) / 2.0;    // u_{n+1}
            psi[n + 1] = (1.0 - eps);      // u_{n+2}
            INFO(name);
            CHECK((rep.Lambda() * psi - psi).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("D_4^(3) standard rep") {
    auto alg = algebra_data("G2");
    auto rep = standard_rep_D43(alg, Rational(0));
    REQUIRE(rep.dim == 8);
    CHECK(1.0 / (3.0 + 2.0 * std::sqrt(3.0)) == Approx(0.154700538).epsilon(1e-8));
    auto rp = check_chevalley(rep);
    CHECK(rp.max_residual < 1e-12);
    CHECK(rp.grading_residual < 1e-12);

    CMatrix c = rep.e[0] * rep.f[0] - rep.f[0] * rep.e[0] - rep.h[0];
    CHECK(cnorm(c) < 1e-12);
}

TEST_CASE("wedge representation") {
    auto alg = algebra_data("B3");
    auto std0 = standard_rep_A2odd(alg, Rational(1, 2));
    auto w2 = wedge_rep(std0, 2);
    REQUIRE(w2.dim == 15);

    SECTION("Chevalley relations survive the Leibniz action") {
        auto rp = check_chevalley(w2);
        CHECK(rp.max_residual < 1e-12);
        CHECK(rp.grading_residual < 1e-12);
    }
    SECTION("weight additivity") {
        for (int b = 0; b < w2.dim; ++b) {
            Rational want(0);
            for (int idx : w2.basis_tuples[b]) want += std0.grading_wt[idx];
            CHECK(w2.grading_wt[b] == want);
            for (int i = 0; i < 3; ++i) {
                std::int64_t sum = 0;
                for (int idx : w2.basis_tuples[b]) sum += std0.weights[idx][i];
                CHECK(w2.weights[b][i] == sum);
            }
        }
        // u_1 wedge u_2 carries grading 5/2 + 3/2 = 4
        CHECK(w2.grading_wt[0] == Rational(4));
    }
    SECTION("p = 1 is the identity functor") {
        auto w1 = wedge_rep(std0, 1);
        CHECK(cnorm(w1.Lambda() - std0.Lambda()) == 0.0);
    }
    SECTION("p out of range") {
        CHECK_THROWS(wedge_rep(std0, 0));
        CHECK_THROWS(wedge_rep(std0, 7));
    }
}

TEST_CASE("tensor representation") {
    auto alg = algebra_data("B3");
    auto v1 = fundamental_rep(alg, 1);

    SECTION("single factor is identity") {
        auto t = tensor_rep({v1});
        CHECK(cnorm(t.Lambda() - v1.Lambda()) == 0.0);
    }
    SECTION("Kronecker-sum spectrum = pairwise sums") {
        auto v1b = evaluation_shift(v1, Rational(1, 4));
        auto t = tensor_rep({v1, v1b});
        REQUIRE(t.dim == 36);
        auto rp = check_chevalley(t);
        CHECK(rp.max_residual < 1e-12);

        Eigen::ComplexEigenSolver<CMatrix> sa(v1.Lambda()), sb(v1b.Lambda()), st(t.Lambda());
        std::vector<Complex> sums;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) sums.push_back(sa.eigenvalues()[i] + sb.eigenvalues()[j]);
        std::vector<Complex> got(st.eigenvalues().data(), st.eigenvalues().data() + 36);
        // greedy nearest-neighbour multiset match
        double worst = 0;
        std::vector<bool> used(got.size(), false);
        for (const Complex& s : sums) {
            int best = -1;
            double bd = 1e300;
            for (size_t i = 0; i < got.size(); ++i) {
                if (used[i]) continue;
                double d = std::abs(s - got[i]);
                if (d < bd) { bd = d; best = static_cast<int>(i); }
            }
            used[best] = true;
            worst = std::max(worst, bd);
        }
        CHECK(worst < 1e-9);
    }
    SECTION("mixed algebras rejected") {
        auto other = fundamental_rep(algebra_data("G2"), 1);
        CHECK_THROWS(tensor_rep({v1, other}));
    }
}

TEST_CASE("evaluation shift") {
    auto alg = algebra_data("B3");
    auto rep = standard_rep(alg);
    SECTION("s = 0 and s = 1 are the identity") {
        auto r0 = evaluation_shift(rep, Rational(0));
        auto r1 = evaluation_shift(rep, Rational(1));
        CHECK(cnorm(r0.e[0] - rep.e[0]) == 0.0);
        CHECK(cnorm(r1.e[0] - rep.e[0]) < 1e-14);
        CHECK(cnorm(r1.f[0] - rep.f[0]) < 1e-13);
    }
    SECTION("shift by 1/r matches the sigma-twist spectrum rotation") {
        auto shifted = evaluation_shift(rep, Rational(1, 2));
        Eigen::ComplexEigenSolver<CMatrix> s0(rep.Lambda()), s1(shifted.Lambda());
        const Complex rot = alg.gamma(0.5);
        std::vector<Complex> a, b;
        for (int i = 0; i < rep.dim; ++i) {
            a.push_back(rot * s0.eigenvalues()[i]);
            b.push_back(s1.eigenvalues()[i]);
        }
        auto less = [](const Complex& x, const Complex& y) {
            return std::make_pair(std::round(x.real() * 1e9), std::round(x.imag() * 1e9)) <
                   std::make_pair(std::round(y.real() * 1e9), std::round(y.imag() * 1e9));
        };
        std::sort(a.begin(), a.end(), less);
        std::sort(b.begin(), b.end(), less);
        double worst = 0;
        for (int i = 0; i < rep.dim; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("rotation operator") {
    auto alg = algebra_data("B3");
    auto rep = standard_rep(alg);
    const Complex gamma = alg.gamma();

    SECTION("k = 0 is the identity") {
        CHECK(cnorm(rotation_operator(rep, 0, gamma) - CMatrix::Identity(6, 6)) == 0.0);
    }
    SECTION("composition law") {
        CMatrix a = rotation_operator(rep, 0.3, gamma) * rotation_operator(rep, 0.45, gamma);
        CMatrix b = rotation_operator(rep, 0.75, gamma);
        CHECK(cnorm(a - b) < 1e-14);
    }
    SECTION("gamma^{-kh} psi is the eigenvector of Lambda in V_k with eigenvalue gamma^k") {
        CVector psi(6);
        psi << 2, 2, 2, 2, 2, 1;
        for (double k : {1.0, 2.0}) {
            CVector v = rotate_vector(rep, k, gamma, psi);
            Complex lam = std::pow(gamma, k);
            CHECK((rep.Lambda() * v - lam * v).cwiseAbs().maxCoeff() < 1e-12);
        }
        // half-integer k lands in the shifted representation
        auto shifted = evaluation_shift(rep, Rational(1, 2));
        CVector v = rotate_vector(rep, 0.5, gamma, psi);
        Complex lam = std::pow(gamma, 0.5);
        CHECK((shifted.Lambda() * v - lam * v).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("fundamental representations") {
    SECTION("B3 dims and twists") {
        auto alg = algebra_data("B3");
        auto v2 = fundamental_rep(alg, 2);
        CHECK(v2.dim == 15);
        CHECK(v2.eval_k == Rational(1, 2));
        auto v3 = fundamental_rep(alg, 3);
        CHECK(v3.dim == 20);
        CHECK(v3.eval_k == Rational(0));
    }
    SECTION("C2 V1 and the spin surrogate") {
        auto alg = algebra_data("C2");
        auto v1 = fundamental_rep(alg, 1);
        CHECK(v1.dim == 6);
        CHECK(v1.eval_k == Rational(0));
        CHECK_FALSE(v1.spin_surrogate);
        auto u2 = fundamental_rep(alg, 2);
        CHECK(u2.spin_surrogate);
        CHECK(u2.dim == 15);
        CHECK(u2.eval_k == Rational(1, 4));
    }
    SECTION("G2 dims") {
        auto alg = algebra_data("G2");
        CHECK(fundamental_rep(alg, 1).dim == 8);
        auto v2 = fundamental_rep(alg, 2);
        CHECK(v2.dim == 28);
        CHECK(v2.eval_k == Rational(1, 2));
        auto rp = check_chevalley(v2);
        CHECK(rp.max_residual < 1e-12);
    }
    SECTION("unsupported combinations are reported") {
        CHECK_THROWS(fundamental_rep(algebra_data("F4"), 1));
        CHECK_THROWS(fundamental_rep(algebra_data("B3"), 4));
    }
}

TEST_CASE("Chevalley suite over standard reps", "[chevalley]") {
    for (const char* name : {"B3", "B4", "C2", "C3", "C4", "G2", "A2", "A3"}) {
        auto alg = algebra_data(name);
        auto rep = standard_rep(alg);
        INFO(name);
        auto rp = check_chevalley(rep);
        CHECK(rp.max_residual < 1e-12);
        CHECK(rp.grading_residual < 1e-12);
    }
}
