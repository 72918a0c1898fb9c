#ifndef FFNF_PIPELINE3D_HPP
#define FFNF_PIPELINE3D_HPP

#include "inner_nf.hpp"

#include <array>

namespace ffnf {

// Coefficients of the quadratic 3D unfolding; a[0], b[0] unused.
struct Binding3D {
    Scalar eps;
    std::array<Scalar, 10> a{};
    std::array<Scalar, 6> b{};
    Scalar c1, c2;

    static Binding3D from_map(const std::map<std::string, Scalar>& m) {
        Binding3D B;
        auto get = [&](const std::string& k) {
            auto it = m.find(k);
            return it == m.end() ? Scalar(0) : it->second;
        };
        B.eps = get("eps");
        for (int i = 1; i <= 9; ++i) B.a[i] = get("a" + std::to_string(i));
        for (int i = 1; i <= 5; ++i) B.b[i] = get("b" + std::to_string(i));
        B.c1 = get("c1");
        B.c2 = get("c2");
        return B;
    }
    void canonicalize() {
        eps.canonicalize();
        c1.canonicalize();
        c2.canonicalize();
        for (auto& v : a) v.canonicalize();
        for (auto& v : b) v.canonicalize();
    }
};

inline VectorField system_3d(const Binding3D& B, const RingPtr& r = make_ring(3)) {
    auto x = [&](int i, const Scalar& c) { return Poly::var(r, i - 1, c); };
    auto xx = [&](int i, int j, const Scalar& c) { return Poly::var(r, i - 1) * Poly::var(r, j - 1, c); };
    const auto& a = B.a;
    const auto& b = B.b;
    const Scalar& e = B.eps;
    Poly f1 = x(2, 1) + x(1, e * a[1]) + x(2, e * a[2]) + x(3, e * a[3]) + xx(2, 3, a[4]) + xx(2, 2, a[5]) +
              xx(3, 3, a[6]) + xx(1, 3, a[7]) + xx(1, 1, a[8]) + xx(1, 2, a[9]);
    Poly f2 = x(3, 1) + x(3, e * b[2]) + x(2, e * b[1]) + xx(2, 3, b[3]) + xx(2, 2, b[4]) + xx(3, 3, b[5]);
    Poly f3 = x(3, e * B.c1) + xx(3, 3, B.c2);
    return VectorField(r, {f1, f2, f3});
}

struct Linear3D {
    Scalar t1, delta;
    VectorField generator;
    VectorField system;
};

// Removes the x3 d1 entry; the superdiagonal (1,2) entry becomes 1 + eps*delta.
inline Linear3D linear_normalize_3d(Binding3D B) {
    B.canonicalize();
    const Scalar& e = B.eps;
    Scalar s = 1 + e * B.b[2];
    if (s == 0) throw singular_binding("1 + eps*b2 vanishes");
    auto r = make_ring(3);
    Linear3D out;
    out.t1 = B.a[3] / s;
    out.delta = B.a[2] + e * B.a[3] * (B.a[1] - B.b[1]) / s;
    out.generator = VectorField(r);
    out.generator.comp(1) = Poly::var(r, 1, e * out.t1);
    out.system = exp_ad(out.generator, system_3d(B, r), Truncation::degree(r, 2));
    return out;
}

// Coordinate scaling that turns every superdiagonal coefficient into 1.
inline VectorField rescale_offdiagonal(const VectorField& X) {
    const RingPtr& r = X.ring();
    int n = r->n;
    Matrix A = detail::linear_matrix(X);
    std::vector<Scalar> k(n + 1, Scalar(1));
    for (int p = n - 1; p >= 1; --p) {
        if (A(p - 1, p) == 0) throw singular_binding("superdiagonal entry " + std::to_string(p) + " vanishes");
        k[p] = A(p - 1, p) * k[p + 1];
    }
    std::vector<Poly> img;
    for (int q = 1; q <= n; ++q) img.push_back(Poly::var(r, q - 1, k[q]));
    Grading g = Grading::delta1(r);
    VectorField out(r);
    for (int p = 1; p <= n; ++p) out.comp(p) = X.comp(p).compose(img, g.w, LONG_MAX / 4).scaled(1 / k[p]);
    return out;
}
inline VectorField rescale_offdiagonal(const VectorField& X, const std::map<std::string, Scalar>& binding) {
    auto r0 = make_ring(X.n());
    VectorField Y(r0);
    for (int p = 1; p <= X.n(); ++p) Y.comp(p) = X.comp(p).substitute(binding, r0);
    return rescale_offdiagonal(Y);
}

struct CoefficientRow {
    std::string name;
    Scalar pipeline, formula;
    bool match = false;
    std::string note;
};

struct Pipeline3DReport {
    Binding3D binding;
    NormalFormTrace trace;
    std::vector<CoefficientRow> rows;
    std::array<Scalar, 5> alpha{};          // solved generator of the last step
    Scalar alpha4_reference, alpha4_corrected;
    Scalar x1sq, delta_coord;              // residual of component 1 in the tau basis
    bool support_tau = false;              // residual of component 1 lies in span{x1^2, 2x1x3 - x2^2}
    bool coefficients_ok() const {
        for (auto& r : rows)
            if (!r.match) return false;
        return true;
    }
};

inline Pipeline3DReport reproduce_3d_pipeline(Binding3D B) {
    B.canonicalize();
    const Scalar& e = B.eps;
    const auto& a = B.a;
    const auto& b = B.b;
    const Scalar& c1 = B.c1;
    Scalar s = 1 + e * b[2];
    if (s == 0) throw singular_binding("1 + eps*b2 vanishes");

    auto r = make_ring(3);
    Pipeline3DReport rep;
    rep.binding = B;
    auto& tr = rep.trace;
    tr.input = system_3d(B, r);
    tr.truncation = Truncation::degree(r, 2);
    tr.truncation_degree = 2;
    tr.residual_basis = "tau";

    auto x = [&](int i) { return Poly::var(r, i - 1); };
    auto mono = [&](int i, int j) {
        Monomial m(3, 0);
        ++m[i - 1];
        ++m[j - 1];
        return m;
    };
    auto coef = [&](const VectorField& V, int p, int i, int j) { return V.comp(p).coeff(mono(i, j)); };

    auto lin = linear_normalize_3d(B);
    VectorField V = record(tr, StepKind::Linear, 0, 1, lin.generator, tr.input, "Y1");
    Scalar delta = lin.delta;
    Scalar sd = 1 + e * delta;
    if (sd == 0) throw singular_binding("1 + eps*delta vanishes");
    Scalar a14 = coef(V, 1, 2, 3), a15 = coef(V, 1, 2, 2), a16 = coef(V, 1, 3, 3), a19 = coef(V, 1, 1, 2);

    VectorField Y2(r);
    Y2.comp(2) = (x(2) * x(3)).scaled(b[5] / s) + (x(2) * x(2)).scaled((b[3] + e * b[2] * b[3] - e * b[5] * c1) / (2 * s * s));
    V = record(tr, StepKind::Inner, 1, 2, Y2, V, "Y2");
    Scalar a24 = coef(V, 1, 2, 3), a25 = coef(V, 1, 2, 2), b24 = coef(V, 2, 2, 2);

    // last step: clear x2x3, x3^2, x1x2 and align the x2^2, x1x3 pair with 2x1x3 - x2^2
    std::array<Monomial, 4> gm{mono(2, 3), mono(2, 2), mono(1, 1), mono(1, 2)};
    Matrix S(4, 4);
    std::vector<Scalar> rhs(4);
    auto rows_of = [&](const VectorField& W) {
        return std::array<Scalar, 4>{coef(W, 1, 2, 3), coef(W, 1, 3, 3), coef(W, 1, 1, 2),
                                     coef(W, 1, 2, 2) + coef(W, 1, 1, 3) / 2};
    };
    for (int j = 0; j < 4; ++j) {
        VectorField G(r);
        G.comp(1) = Poly::term(r, gm[j], 1);
        auto col = rows_of(lie_bracket(G, V, &tr.truncation));
        for (int i = 0; i < 4; ++i) S(i, j) = col[i];
    }
    auto cur = rows_of(V);
    for (int i = 0; i < 4; ++i) rhs[i] = -cur[i];
    auto sol = SquareSolver(S).solve(rhs);
    if (!sol) throw singular_binding("last quadratic step is singular at this binding");
    VectorField Y3(r);
    for (int j = 0; j < 4; ++j) {
        rep.alpha[j + 1] = (*sol)[j];
        Y3.comp(1) += Poly::term(r, gm[j], (*sol)[j]);
    }
    V = record(tr, StepKind::Inner, 1, 1, Y3, V, "Y3");
    tr.output = V;

    rep.x1sq = coef(V, 1, 1, 1);
    rep.delta_coord = coef(V, 1, 1, 3) / 2;
    rep.support_tau = coef(V, 1, 2, 3) == 0 && coef(V, 1, 3, 3) == 0 && coef(V, 1, 1, 2) == 0 &&
                      coef(V, 1, 2, 2) == -rep.delta_coord;

    // closed formulas, each fed with the pipeline's earlier quantities
    const Scalar& al4 = rep.alpha[4];
    auto add = [&](std::string nm, Scalar pipe, Scalar formula, std::string note = {}) {
        rep.rows.push_back({std::move(nm), pipe, formula, pipe == formula, std::move(note)});
    };
    add("t1", lin.t1, a[3] / s);
    add("delta", delta, a[2] + e * a[3] * (a[1] - b[1]) / s);
    add("a1_4", a14, a[4] + e * a[3] * (a[7] - b[3]) / s);
    add("a1_5", a15, a[5] + e * a[3] * (a[9] - b[4]) / s + e * e * a[3] * a[3] * a[8] / (s * s));
    add("a1_6", a16, a[6] - e * b[5] * a[3] / s);
    add("a1_9", a19, a[9] + 2 * e * a[3] * a[8] / s);
    add("a2_4", a24, a[4] + delta * e * b[5] / s + b[5] / s,
        "reference formula starts from a4; the pipeline value equals it with a1_4 in place of a4");
    add("a2_5", a25,
        ((delta * b[2] * b[3] - delta * b[5] * c1 + 2 * a15 * b[2] * b[2]) * e * e +
         (delta * b[3] - b[5] * c1 + (4 * a15 + b[3]) * b[2]) * e + 2 * a15 + b[3]) / (2 * s * s));
    add("b2_4", b24,
        -(e * e * b[2] * b[1] * b[3] - e * e * b[1] * b[5] * c1 - 2 * e * e * b[2] * b[2] * b[4] + e * b[1] * b[3] -
          4 * e * b[2] * b[4] - 2 * b[4]) / (2 * s * s));
    add("alpha1", rep.alpha[1], a16 / s);
    add("alpha2", rep.alpha[2], -(-e * a[1] * a16 + e * a16 * b[1] + e * a16 * c1 - e * a24 * b[2] - a24) / (2 * s * s));
    add("alpha3", rep.alpha[3], -(e * b[1] * al4 - a19) / (2 * sd));

    auto alpha4 = [&](const Scalar& d3) -> Scalar {
        Scalar n1 = e * e * a[1] * a[1] * a16 - 3 * e * e * a[1] * a16 * b[1] - e * e * a[1] * a16 * c1 +
                    e * e * a[1] * a24 * b[2] + e * e * a[7] * b[2] * b[2] + 2 * e * e * a16 * b[1] * b[1] +
                    2 * e * e * a16 * b[1] * c1 - 2 * e * e * a24 * b[1] * b[2];
        Scalar n2 = a[7] + 2 * a25 + 2 * e * e * a25 * b[2] * b[2] + e * a[1] * a24 + 2 * e * a[7] * b[2] -
                    2 * e * a24 * b[1] + 4 * e * a25 * b[2];
        if (d3 == 0) throw singular_binding("alpha4 denominator vanishes");
        return (n1 + n2) / (s * s * d3);
    };
    rep.alpha4_reference = alpha4(3 + e * delta + e * b[2]);
    rep.alpha4_corrected = alpha4(3 + 2 * e * delta + e * b[2]);
    add("alpha4", al4, rep.alpha4_reference, "reference denominator 3+eps*delta+eps*b2; exact solve needs 3+2*eps*delta+eps*b2");
    add("a3_5", rep.x1sq, (e * e * a[1] * b[1] * al4 + 2 * e * delta * a[8] - e * a[1] * a19 + 2 * a[8]) / (2 * sd),
        "survives on x1^2");
    add("a3_7", rep.delta_coord, -(e * b[2] * al4 + al4 - a[7]) / 2, "coordinate along 2x1x3 - x2^2");
    return rep;
}

} // namespace ffnf

#endif
