#include "oracles.hpp"

#include "ffnf/pipeline3d.hpp"

#include <gtest/gtest.h>

using namespace ffnf;

namespace {

bool slices_in_kernel(const VectorField& V, long max_grade) {
    const RingPtr& r = V.ring();
    int n = r->n;
    Grading g = Grading::delta1(r);
    for (int p = 1; p <= n; ++p) {
        auto t = build_sl2(r, p);
        for (long d = 1; d <= max_grade; ++d)
            if (!t.M.apply(V.slice(g, d).comp(p)).is_zero()) return false;
    }
    return true;
}

Binding3D random_binding(oracle::Rng& rng) {
    for (;;) {
        Binding3D B;
        B.eps = rng.rational();
        for (int i = 1; i <= 9; ++i) B.a[i] = rng.rational();
        for (int i = 1; i <= 5; ++i) B.b[i] = rng.rational();
        B.c1 = rng.rational();
        B.c2 = rng.rational();
        Scalar s = 1 + B.eps * B.b[2];
        if (s == 0) continue;
        Scalar delta = B.a[2] + B.eps * B.a[3] * (B.a[1] - B.b[1]) / s;
        if (1 + B.eps * delta == 0 || 3 + 2 * B.eps * delta + B.eps * B.b[2] == 0 || 3 + B.eps * delta + B.eps * B.b[2] == 0) continue;
        return B;
    }
}

} // namespace

TEST(InnerNF, RandomSystemsLandInKernelAndReplay) {
    oracle::Rng rng(101);
    for (int n = 2; n <= 5; ++n) {
        auto r = make_ring(n);
        for (int it = 0; it < 8; ++it) {
            VectorField X = oracle::random_triangular(r, rng, {2, 3});
            auto tr = inner_normalize(X, 4);
            EXPECT_TRUE(slices_in_kernel(tr.output, 3));
            EXPECT_TRUE(tr.all_ok());
            EXPECT_TRUE(replay(tr).ok);
        }
    }
}

TEST(InnerNF, ThreeDimensionalQuadraticResidualIsTauSpan) {
    oracle::Rng rng(7);
    auto r = make_ring(3);
    for (int it = 0; it < 10; ++it) {
        VectorField X = oracle::random_triangular(r, rng, {2}, 1.0);
        auto tr = inner_normalize(X, 2);
        Poly q = tr.output.comp(1).filter([](const Monomial& m) { return total_degree(m) == 2; });
        auto c = tau_coordinates(q, 1);
        EXPECT_EQ(q, tau_closed_form(r, 1, 0).poly.scaled(c[0]) + tau_closed_form(r, 1, 2).poly.scaled(c[1]));
    }
}

TEST(InnerNF, LinearOffDiagonalTermsAreRemoved) {
    auto r = make_ring(4);
    VectorField X(r);
    X.comp(1) = Poly::var(r, 1) + Poly::var(r, 2, 3) - Poly::var(r, 3, Scalar(1, 2));
    X.comp(2) = Poly::var(r, 2) + Poly::var(r, 3, 5);
    X.comp(3) = Poly::var(r, 3);
    auto tr = inner_normalize(X, 2);
    for (int p = 1; p <= 4; ++p)
        for (auto& [m, c] : tr.output.comp(p).terms()) {
            int q = 0;
            while (!m[q]) ++q;
            EXPECT_EQ(q, p) << "component " << p << " keeps x" << q + 1;
        }
    EXPECT_TRUE(replay(tr).ok);
}

TEST(InnerNF, NumericConstantsAreTranslatedAway) {
    auto r = make_ring(3);
    VectorField X(r);
    X.comp(1) = Poly::var(r, 1) + Poly::constant(r, 2) + Poly::var(r, 0) * Poly::var(r, 0);
    X.comp(2) = Poly::var(r, 2) + Poly::constant(r, -1);
    X.comp(3) = Poly::var(r, 2) * Poly::var(r, 2);
    auto ct = constant_normalize(X, 3);
    EXPECT_TRUE(ct.notes.empty());
    for (int j = 1; j < 3; ++j) EXPECT_EQ(ct.output.comp(j).coeff(Monomial(3, 0)), 0);
    EXPECT_TRUE(replay(ct).ok);
}

TEST(InnerNF, GradedParametersAreNormalized) {
    auto r = make_ring(2, {"mu", "nu"}, {1, 2});
    VectorField X(r);
    X.comp(1) = Poly::var(r, 1) + Poly::var(r, 2) * Poly::var(r, 0) + Poly::var(r, 2) * Poly::var(r, 1) +
                Poly::var(r, 0) * Poly::var(r, 1) + Poly::var(r, 3);
    X.comp(2) = Poly::var(r, 1) * Poly::var(r, 1);
    auto tr = inner_normalize(X, 3);
    EXPECT_TRUE(tr.all_ok());
    EXPECT_TRUE(replay(tr).ok);
    EXPECT_EQ(tr.output.comp(1).coeff(Monomial{0, 0, 0, 1}), 0);
    EXPECT_TRUE(slices_in_kernel(tr.output, 2));
}

TEST(InnerNF, UngradedSymbolicParameterIsRejected) {
    auto r = make_ring(2, {"a"}, {0});
    VectorField X(r);
    X.comp(1) = Poly::var(r, 1) + Poly::var(r, 2) * Poly::var(r, 0) * Poly::var(r, 0);
    EXPECT_THROW(inner_normalize(X, 3), std::invalid_argument);
}

TEST(InnerNF, NonTriangularInputIsRejected) {
    auto r = make_ring(2);
    VectorField X(r);
    X.comp(2) = Poly::var(r, 0);
    EXPECT_THROW(inner_normalize(X, 2), std::invalid_argument);
}

TEST(InnerNF, ZeroSuperdiagonalIsSingular) {
    auto r = make_ring(3);
    VectorField X(r);
    X.comp(1) = Poly::constant(r, 1);
    X.comp(2) = Poly::var(r, 2) * Poly::var(r, 2);
    EXPECT_THROW(constant_normalize(X, 2), singular_binding);
}

TEST(Pipeline3D, CoefficientRowsAgainstClosedFormulas) {
    oracle::Rng rng(31);
    for (int it = 0; it < 20; ++it) {
        Binding3D B;
        Pipeline3DReport rep;
        for (;;) {
            B = random_binding(rng);
            try {
                rep = reproduce_3d_pipeline(B);
                break;
            } catch (const singular_binding&) {
            }
        }
        EXPECT_TRUE(replay(rep.trace).ok);
        std::map<std::string, CoefficientRow> row;
        for (auto& x : rep.rows) row[x.name] = x;
        for (auto nm : {"t1", "delta", "a1_4", "a1_5", "a1_6", "a1_9", "a2_5", "b2_4", "alpha1", "alpha2", "alpha3", "a3_5", "a3_7"})
            EXPECT_TRUE(row.at(nm).match) << nm;
        const Scalar& e = B.eps;
        Scalar s = 1 + e * B.b[2];
        EXPECT_EQ(row.at("t1").pipeline, B.a[3] / s);
        // a2_4 follows from a1_4, not a4
        Scalar a14 = row.at("a1_4").pipeline, delta = row.at("delta").pipeline;
        EXPECT_EQ(row.at("a2_4").pipeline, a14 + delta * e * B.b[5] / s + B.b[5] / s);
        EXPECT_EQ(rep.alpha4_corrected, rep.alpha[4]);
        EXPECT_TRUE(rep.support_tau);
    }
}

TEST(Pipeline3D, SingularBindingIsReported) {
    Binding3D B;
    B.eps = 1;
    B.b[2] = -1;
    EXPECT_THROW(reproduce_3d_pipeline(B), singular_binding);
}

TEST(Pipeline3D, OffDiagonalRescalingGivesUnitShift) {
    oracle::Rng rng(77);
    auto V = rescale_offdiagonal(system_3d(random_binding(rng)));
    EXPECT_EQ(V.comp(1).coeff(Monomial{0, 1, 0}), 1);
    EXPECT_EQ(V.comp(2).coeff(Monomial{0, 0, 1}), 1);
}
