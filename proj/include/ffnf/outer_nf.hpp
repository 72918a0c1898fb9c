#ifndef FFNF_OUTER_NF_HPP
#define FFNF_OUTER_NF_HPP

#include "inner_nf.hpp"

#include <random>

namespace ffnf {

inline OuterGenerator zero_generator(const RingPtr& r, int block) { return {block, Poly(r), VectorField(r)}; }

inline OuterGenerator combine(const std::vector<OuterGenerator>& basis, const std::vector<Scalar>& x) {
    OuterGenerator g = basis.front().scaled(0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (x[j] == 0) continue;
        g.ring_part += basis[j].ring_part.scaled(x[j]);
        g.field_part += basis[j].field_part.scaled(x[j]);
    }
    return g;
}

// rho([g1,g2]) V - (rho(g1) rho(g2) V - rho(g2) rho(g1) V) on the block's components and beyond.
// Components below the block are dropped: the action lives on the quotient by them.
inline VectorField rho_representation_defect(const OuterGenerator& g1, const OuterGenerator& g2, const VectorField& V,
                                             const Truncation* t = nullptr) {
    VectorField lhs = rho(semidirect_bracket(g1, g2), V, t);
    VectorField rhs = rho(g1, rho(g2, V, t), t) - rho(g2, rho(g1, V, t), t);
    VectorField d = lhs - rhs;
    for (int p = 1; p < block_start(V, g1.block); ++p) d.comp(p) = Poly(V.ring());
    return t ? d.truncated(*t) : d;
}

// Random positive-grade generators of one block and V inside that block; true iff every defect vanishes.
inline bool rho_representation_check(int n, int samples, long K, unsigned seed = 1) {
    auto r = make_ring(n);
    Truncation t = Truncation::degree(r, K);
    std::mt19937 gen(seed);
    auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(gen) == 1; };
    auto coeff = [&] {
        Scalar q(std::uniform_int_distribution<int>(-5, 5)(gen), std::uniform_int_distribution<int>(1, 4)(gen));
        q.canonicalize();
        return q;
    };
    auto random_poly = [&](int p, int lo, int hi) {
        Poly f(r);
        for (int d = lo; d <= hi; ++d)
            for (auto& m : monomial_basis(r, p, d))
                if (coin()) f.add_term(m, coeff());
        return f;
    };
    for (int s = 0; s < samples; ++s) {
        int b = std::uniform_int_distribution<int>(1, n)(gen);
        auto make = [&] {
            OuterGenerator g = zero_generator(r, b);
            g.ring_part = random_poly(b, 1, 2);
            for (int p = 1; p <= b; ++p) g.field_part.comp(p) = random_poly(p, 2, 3);
            return g;
        };
        OuterGenerator g1 = make(), g2 = make();
        VectorField V(r);
        V.comp(b) = random_poly(b, 1, 3);
        if (!rho_representation_defect(g1, g2, V, &t).is_zero()) return false;
    }
    return true;
}

struct Position {
    int comp;
    Monomial m;
};

// Coefficients x with sum_j x_j * (rho(basis_j) V)[pos_i] = change_i; throws if the ansatz cannot reach the target.
inline std::vector<Scalar> solve_first_order(const VectorField& V, const std::vector<OuterGenerator>& basis,
                                             const std::vector<Position>& pos, const std::vector<Scalar>& change,
                                             const Truncation& t) {
    Matrix A(pos.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        VectorField img = rho(basis[j], V, &t);
        for (std::size_t i = 0; i < pos.size(); ++i) A(i, j) = img.comp(pos[i].comp).coeff(pos[i].m);
    }
    auto x = solve_any(A, change);
    if (!x) throw std::logic_error("outer ansatz has no solution for the requested change");
    return *x;
}

inline std::vector<Position> positions_of(const Poly& f, int comp) {
    std::vector<Position> out;
    for (auto& [m, c] : f.terms()) out.push_back({comp, m});
    return out;
}

// Slices of components [lo, hi] with grade < below agree.
inline bool unchanged_below(const VectorField& a, const VectorField& b, const Grading& g, long below, int lo, int hi) {
    for (int p = lo; p <= hi; ++p) {
        auto keep = [&](int q) {
            return [&, q](const Monomial& m) { return g.field_grade(m, q - 1) < below; };
        };
        if (a.comp(p).filter(keep(p)) != b.comp(p).filter(keep(p))) return false;
    }
    return true;
}

struct TauGenerator {
    OuterGenerator generator;
    Scalar alpha;
    std::vector<Scalar> beta;  // beta[j-1] = beta_j
    bool recurrence_checked = false;
    bool recurrence_ok = true;
};

// Closed recurrence for the tau generator coefficients: {alpha, beta_1..beta_l}.
inline std::vector<Scalar> tau_generator_recurrence(int n, int p, int l) {
    int w = n - p;
    std::vector<Scalar> beta(l + 1);
    beta[l] = binom(w - l, l) * binom(w - l, l);
    if (l % 2 == 0) beta[l] = -beta[l];
    for (int j = l - 1; j >= 2; --j) {
        Scalar t = 2 * binom(w - (2 * l - j), j) * binom(w - j, 2 * l - j);
        beta[j] = -beta[j + 1] - (j % 2 ? -t : t);
    }
    beta[1] = -2 * binom(w, 2 * l);
    Scalar alpha = beta[1] + (l >= 2 ? beta[2] : Scalar(0)) - 2 * Scalar(w + 1 - 2 * l) * binom(w - 1, 2 * l - 1);
    std::vector<Scalar> out{alpha};
    for (int j = 1; j <= l; ++j) out.push_back(beta[j]);
    return out;
}

// (alpha x_{2l+p-1}, sum_j beta_j x_{p+2l-j} x_{p+j-1} d_p) with rho(gen) N = tau_p^{2l} d_p modulo components < p.
inline TauGenerator outer_generator_for_tau(const RingPtr& r, int p, int l) {
    int n = r->n;
    if (l <= 0 || p < 1 || p + 2 * l > n) throw std::out_of_range("tau generator needs l > 0 and p + 2l <= n");
    VectorField N = build_sl2(r, 1).N;
    std::vector<OuterGenerator> basis;
    OuterGenerator ga = zero_generator(r, p);
    ga.ring_part = Poly::var(r, 2 * l + p - 2);
    basis.push_back(ga);
    for (int j = 1; j <= l; ++j) {
        OuterGenerator gb = zero_generator(r, p);
        gb.field_part.comp(p) = Poly::var(r, p + 2 * l - j - 1) * Poly::var(r, p + j - 2);
        basis.push_back(gb);
    }
    Poly tau = tau_closed_form(r, p, 2 * l).poly;
    // every degree-2 monomial of component p appearing in an image or in the target
    std::map<Monomial, int, GrlexGreater> mons;
    for (auto& [m, c] : tau.terms()) mons[m];
    for (auto& b : basis) {
        Poly img = rho(b, N).comp(p);
        for (auto& [m, c] : img.terms()) mons[m];
    }
    std::vector<Position> pos;
    std::vector<Scalar> want;
    for (auto& [m, c] : mons) {
        pos.push_back({p, m});
        want.push_back(tau.coeff(m));
    }
    auto x = solve_first_order(N, basis, pos, want, Truncation::none(r));
    TauGenerator out;
    out.generator = combine(basis, x);
    VectorField img = rho(out.generator, N);
    if (img.comp(p) != tau) throw std::logic_error("tau generator solve left a residual");
    for (int q = p + 1; q <= n; ++q)
        if (!img.comp(q).is_zero()) throw std::logic_error("tau generator leaks into higher components");
    out.alpha = x[0];
    out.beta.assign(x.begin() + 1, x.end());
    if (l >= 2) {
        out.recurrence_checked = true;
        auto rec = tau_generator_recurrence(n, p, l);
        out.recurrence_ok = rec[0] == out.alpha && std::equal(out.beta.begin(), out.beta.end(), rec.begin() + 1);
    }
    return out;
}
inline TauGenerator outer_generator_for_tau(int n, int p, int l) { return outer_generator_for_tau(make_ring(n), p, l); }

namespace detail {

inline void require_nilpotent_linear(const VectorField& V, const std::string& who) {
    int n = V.n();
    Matrix A = linear_matrix(V);
    for (int p = 1; p <= n; ++p)
        for (int q = 1; q <= n; ++q)
            if (A(p - 1, q - 1) != (q == p + 1 ? Scalar(1) : Scalar(0)))
                throw std::invalid_argument(who + ": linear part must be the nilpotent shift");
}

inline Monomial mono(const RingPtr& r, std::initializer_list<std::pair<int, int>> e) {
    Monomial m(r->nvars(), 0);
    for (auto [s, k] : e) m[s] = static_cast<std::uint16_t>(k);
    return m;
}

// -log(1 + w) truncated at ring grade cap
inline Poly neg_log1p(const Poly& w, const std::vector<int>& weights, long cap) {
    Poly out(w.ring()), pw = w;
    for (int k = 1; !pw.is_zero(); ++k) {
        out += pw.scaled(Scalar(k % 2 ? -1 : 1, k));
        pw = pw.mul_capped(w, weights, cap);
        if (k > kMaxExpTerms) throw math_error("log series did not terminate");
    }
    return out;
}

// Ring element log u with u * F = lead, where lead is the lowest term of the single-variable F.
inline Poly orbital_log_multiplier(const Poly& F, const Monomial& lead, const std::vector<int>& weights, long cap) {
    Scalar c = F.coeff(lead);
    if (c == 0) throw singular_binding("leading coefficient of the multiplier target vanishes");
    Poly w(F.ring());
    for (auto& [m, k] : F.terms()) {
        if (m == lead) continue;
        Monomial q = m;
        for (std::size_t s = 0; s < q.size(); ++s) {
            if (q[s] < lead[s]) throw std::invalid_argument("multiplier target is not the lowest term");
            q[s] -= lead[s];
        }
        w.add_term(q, k / c);
    }
    return neg_log1p(w, weights, cap);
}

} // namespace detail

// Degree-2 reduction to sum_p a_p x_p^2 d_p, sweeping components n..1.
inline NormalFormTrace outer_quadratic_normalize(const VectorField& X, long K) {
    require_triangular(X);
    const RingPtr& r = X.ring();
    if (!r->param_names.empty()) throw std::invalid_argument("quadratic outer normalization expects numeric coefficients");
    if (K < 2) throw std::invalid_argument("truncation degree must be at least 2");
    int n = r->n;
    NormalFormTrace tr;
    tr.input = X;
    tr.truncation = Truncation::degree(r, K);
    tr.truncation_degree = K;
    tr.residual_basis = "tau";
    VectorField V = X.truncated(tr.truncation);
    for (int j = 1; j <= n; ++j)
        if (!detail::numeric_constant(V.comp(j)).is_zero()) throw std::invalid_argument("constant terms are not allowed");
    detail::require_nilpotent_linear(V, "outer_quadratic_normalize");
    Matrix A = detail::linear_matrix(V);
    Grading g = tr.truncation.g;
    bool rescan = true;
    std::string rescan_detail;
    for (int p = n; p >= 1; --p) {
        Poly sl = V.slice(g, 1).comp(p);
        if (!sl.is_zero()) {
            HomologicalSolver hs(r, A, p, 2);
            VectorField Y(r);
            Y.comp(p) = hs.solve(sl).generator;
            if (!Y.is_zero()) {
                VectorField before = V;
                V = record(tr, StepKind::Inner, 1, p, Y, V, "inner");
                if (p < n && !unchanged_below(before, V, g, K, p + 1, n)) rescan = false, rescan_detail = "inner step at component " + std::to_string(p);
            }
        }
        auto coords = tau_coordinates(V.slice(g, 1).comp(p), p);
        for (std::size_t l = 1; l < coords.size(); ++l) {
            if (coords[l] == 0) continue;
            auto gen = outer_generator_for_tau(r, p, static_cast<int>(l)).generator.scaled(-coords[l]);
            VectorField before = V;
            V = record(tr, StepKind::Outer, 1, p, gen, V, "tau^" + std::to_string(2 * l));
            if (p < n && !unchanged_below(before, V, g, K, p + 1, n)) rescan = false, rescan_detail = "outer step at component " + std::to_string(p);
        }
    }
    tr.output = V;
    bool diag = true;
    std::string detail;
    for (int p = 1; p <= n; ++p) {
        Poly q = V.slice(g, 1).comp(p);
        Poly want = Poly::term(r, detail::mono(r, {{p - 1, 2}}), q.coeff(detail::mono(r, {{p - 1, 2}})));
        if (q != want) diag = false, detail = "component " + std::to_string(p) + ": " + q.render();
    }
    tr.verdicts.push_back({"diagonal_quadratic", diag, detail});
    tr.verdicts.push_back({"rescan", rescan, rescan_detail});
    return tr;
}

struct Grade2D {
    long grade = 0;
    std::vector<Scalar> c;            // c_i: coefficient of mu^i x1^(grade-i+1), i = 0..grade, before the step
    std::vector<Scalar> alpha, beta;  // solved generator, i = 0..grade-1
    Scalar mu_coefficient;            // coefficient of mu x1 in the leading part
    Scalar survivor;                  // coefficient of mu^grade x1 after the step
};

struct Outer2DResult {
    NormalFormTrace trace;
    Scalar a2, b2;
    std::vector<Grade2D> grades;
};

inline Grading delta2_2d(const RingPtr& r) {
    Grading g = Grading::delta1(r);
    g.w[0] = 1;
    g.w[1] = 2;
    return g;
}

// sum_{k=0}^{n} (-1/(2 a2))^k c_{n-k}
inline Scalar survivor_closed_form(const std::vector<Scalar>& c, const Scalar& a2) {
    long n = static_cast<long>(c.size()) - 1;
    Scalar q = -1 / (2 * a2), acc = 0, pw = 1;
    for (long k = 0; k <= n; ++k, pw *= q) acc += pw * c[n - k];
    return acc;
}

// beta_i = sum_{k=1}^{i+1} (-1/(2 a2))^k c_{i-k+1}
inline Scalar beta_closed_form(const std::vector<Scalar>& c, const Scalar& a2, long i) {
    Scalar q = -1 / (2 * a2), acc = 0, pw = q;
    for (long k = 1; k <= i + 1; ++k, pw *= q) acc += pw * c[i - k + 1];
    return acc;
}

// Input coefficient polynomial of a grade evaluated at x1 = -mu/(2 a2), as the mu^n coefficient.
inline Scalar evaluate_at_shift(const std::vector<Scalar>& c, const Scalar& a2) {
    long n = static_cast<long>(c.size()) - 1;
    Scalar x = -1 / (2 * a2), acc = 0;
    for (long k = 0; k <= n; ++k) acc += c[n - k] * ffnf::pow(x, static_cast<unsigned>(k));
    return acc;
}

// 2D outer normalization with one graded versal parameter in component 1.
inline Outer2DResult outer_2d_normalize(const VectorField& X, long K, const std::string& mu = "mu1") {
    require_triangular(X);
    const RingPtr& r = X.ring();
    if (r->n != 2) throw std::invalid_argument("outer_2d_normalize needs a 2D system");
    int ms = r->slot_of(mu);
    if (ms < 0) throw std::invalid_argument("versal parameter " + mu + " is not declared");
    if (r->param_names.size() != 1) throw std::invalid_argument("only the versal parameter " + mu + " may stay symbolic");
    if (r->param_grades[0] != 1) throw std::invalid_argument("versal parameter " + mu + " must have grade 1");
    if (X.comp(2).uses_params()) throw std::invalid_argument("component 2 must not depend on " + mu);
    if (K < 2) throw std::invalid_argument("truncation degree must be at least 2");

    Outer2DResult res;
    // Step 1: first-level normal form
    Truncation t1{Grading::delta1(r), K};
    auto& tr = res.trace;
    tr = inner_normalize(X, t1);
    tr.truncation_degree = K;
    tr.residual_basis = "echelon";
    VectorField V = tr.output;
    detail::require_nilpotent_linear(V, "outer_2d_normalize");
    for (auto& [m, c] : V.comp(1).terms())
        if (state_degree(m, 2) == 0) throw std::invalid_argument("component 1 carries a pure parameter term");
    for (auto& [m, c] : V.comp(2).terms())
        if (state_degree(m, 2) < 2) throw std::invalid_argument("component 2 must start at x2^2");

    Grading g = delta2_2d(r);
    tr.truncation = Truncation{g, K};
    V = V.truncated(tr.truncation);
    Monomial x2sq = detail::mono(r, {{1, 2}});
    res.b2 = V.comp(2).coeff(x2sq);
    if (res.b2 == 0) throw singular_binding("coefficient of x2^2 in component 2 vanishes");
    res.a2 = V.comp(1).coeff(detail::mono(r, {{0, 2}}));
    if (res.a2 == 0) throw singular_binding("coefficient of x1^2 in component 1 vanishes");

    // Step 2: orbital multiplier on component 2
    if (V.comp(2) != Poly::term(r, x2sq, res.b2)) {
        OuterGenerator u = zero_generator(r, 2);
        u.ring_part = detail::orbital_log_multiplier(V.comp(2), x2sq, g.w, K + 4);
        V = record(tr, StepKind::Outer, 0, 2, u, V, "orbital multiplier");
    }
    bool rescan = true;
    std::string rescan_detail;
    Scalar kappa = V.comp(1).coeff(detail::mono(r, {{0, 1}, {static_cast<int>(ms), 1}}));

    // Steps 3-4: one grade at a time
    for (long m = 2; m <= K; ++m) {
        auto at = [&](int p, int q, int j) { return detail::mono(r, {{ms, p}, {0, q}, {1, j}}); };
        // x2^j terms with j >= 2, highest j first
        for (int j = static_cast<int>(m + 1) / 2 + 1; j >= 2; --j) {
            VectorField Y(r);
            Poly sl1 = V.slice(g, m).comp(1);
            for (auto& [mm, c] : sl1.terms()) {
                if (mm[1] != j) continue;
                Monomial h = mm;
                h[0] += 1;
                h[1] -= 1;
                Y.comp(1).add_term(h, c / Scalar(mm[0] + 1));
            }
            if (Y.is_zero()) continue;
            VectorField before = V;
            V = record(tr, StepKind::Inner, m, 1, Y, V, "x2 terms");
            if (!unchanged_below(before, V, g, m, 1, 2)) rescan = false, rescan_detail = "grade " + std::to_string(m);
        }
        Grade2D rec;
        rec.grade = m;
        rec.mu_coefficient = kappa;
        for (long i = 0; i <= m; ++i) rec.c.push_back(V.comp(1).coeff(at(i, m - i + 1, 0)));
        if (V.comp(1).coeff(at(m + 1, 0, 0)) != 0) throw std::invalid_argument("pure parameter term in component 1");

        std::vector<OuterGenerator> basis;
        for (long i = 0; i < m; ++i) {
            OuterGenerator o = zero_generator(r, 1);
            o.ring_part = Poly::term(r, at(i, m - i - 1, 0), 1);
            basis.push_back(o);
        }
        for (long i = 0; i < m; ++i) {
            OuterGenerator c = zero_generator(r, 1);
            c.field_part.comp(1) = Poly::term(r, at(i, m - i, 0), 1);
            basis.push_back(c);
        }
        std::vector<Position> pos;
        std::vector<Scalar> change;
        for (long i = 0; i < m; ++i) {
            pos.push_back({1, at(i, m - 1 - i, 1)});
            change.push_back(-V.comp(1).coeff(pos.back().m));
        }
        for (long i = 0; i < m; ++i) {
            pos.push_back({1, at(i, m - i + 1, 0)});
            change.push_back(-rec.c[i]);
        }
        auto x = solve_first_order(V, basis, pos, change, tr.truncation);
        rec.alpha.assign(x.begin(), x.begin() + m);
        rec.beta.assign(x.begin() + m, x.end());
        bool nonzero = false;
        for (auto& v : x) nonzero = nonzero || v != 0;
        if (nonzero) {
            VectorField before = V;
            V = record(tr, StepKind::Outer, m, 1, combine(basis, x), V, "grade " + std::to_string(m));
            if (!unchanged_below(before, V, g, m, 1, 2)) rescan = false, rescan_detail = "grade " + std::to_string(m);
        }
        rec.survivor = V.comp(1).coeff(at(m, 1, 0));
        res.grades.push_back(rec);
    }
    tr.output = V;

    // support: x2 + a2 x1^2 + sum_m s_m mu^m x1 in component 1, b2 x2^2 in component 2
    bool ok = V.comp(2) == Poly::term(r, x2sq, res.b2);
    std::string why = ok ? "" : "component 2: " + V.comp(2).render();
    for (auto& [m, c] : V.comp(1).terms()) {
        bool allowed = (m[0] == 0 && m[1] == 1 && m[ms] == 0) || (m[0] == 2 && m[1] == 0 && m[ms] == 0) ||
                       (m[0] == 1 && m[1] == 0 && m[ms] >= 1);
        if (!allowed) ok = false, why = "component 1 keeps " + V.comp(1).render_monomial(m);
    }
    tr.verdicts.push_back({"support", ok, why});
    tr.verdicts.push_back({"rescan", rescan, rescan_detail});
    return res;
}

struct Outer3DResult {
    NormalFormTrace trace;
    Scalar a2, b2, c2;
};

// 3D outer normalization to x2 + a2 x1^2, x3 + b2 x2^2, c2 x3^2 up to state degree K.
inline Outer3DResult outer_3d_normalize(const VectorField& X, long K) {
    require_triangular(X);
    const RingPtr& r = X.ring();
    if (r->n != 3) throw std::invalid_argument("outer_3d_normalize needs a 3D system");
    if (!r->param_names.empty()) throw std::invalid_argument("outer_3d_normalize takes no versal parameters");
    if (K < 2) throw std::invalid_argument("truncation degree must be at least 2");

    Outer3DResult res;
    auto& tr = res.trace;
    tr = inner_normalize(X, K);
    tr.residual_basis = "echelon";
    VectorField V = tr.output;
    detail::require_nilpotent_linear(V, "outer_3d_normalize");
    Grading g = tr.truncation.g;
    auto M = [&](int e1, int e2, int e3) { return detail::mono(r, {{0, e1}, {1, e2}, {2, e3}}); };

    res.b2 = V.comp(2).coeff(M(0, 2, 0));
    res.c2 = V.comp(3).coeff(M(0, 0, 2));
    if (res.b2 == 0) throw singular_binding("coefficient b2 of x2^2 in component 2 vanishes");
    if (res.c2 == 0) throw singular_binding("coefficient c2 of x3^2 in component 3 vanishes");
    bool rescan = true;
    std::string rescan_detail;

    // component 3: orbital multiplier
    if (V.comp(3) != Poly::term(r, M(0, 0, 2), res.c2)) {
        OuterGenerator u = zero_generator(r, 3);
        u.ring_part = detail::orbital_log_multiplier(V.comp(3), M(0, 0, 2), g.w, K + 2);
        VectorField before = V;
        V = record(tr, StepKind::Outer, 0, 3, u, V, "orbital multiplier");
        if (!unchanged_below(before, V, g, K, 2, 2)) rescan = false, rescan_detail = "component 3 multiplier";
    }
    // component 2: x2^l, l >= 3
    for (long l = 3; l <= K; ++l) {
        Scalar bl = V.comp(2).coeff(M(0, static_cast<int>(l), 0));
        if (bl == 0) continue;
        OuterGenerator o = zero_generator(r, 2), c = zero_generator(r, 2);
        o.ring_part = Poly::term(r, M(0, static_cast<int>(l) - 2, 0), 1);
        c.field_part.comp(2) = Poly::term(r, M(0, static_cast<int>(l) - 1, 0), 1);
        std::vector<OuterGenerator> basis{o, c};
        std::vector<Position> pos{{2, M(0, static_cast<int>(l) - 2, 1)}, {2, M(0, static_cast<int>(l), 0)}};
        auto x = solve_first_order(V, basis, pos, {Scalar(0), -bl}, tr.truncation);
        VectorField before = V;
        V = record(tr, StepKind::Outer, l - 1, 2, combine(basis, x), V, "x2^" + std::to_string(l));
        if (!unchanged_below(before, V, g, l - 1, 2, 3)) rescan = false, rescan_detail = "component 2, x2^" + std::to_string(l);
    }
    if (V.comp(2) != Poly::var(r, 2) + Poly::term(r, M(0, 2, 0), res.b2) || V.comp(3) != Poly::term(r, M(0, 0, 2), res.c2))
        throw std::logic_error("components 2 and 3 did not reach their outer form");

    // component 1, one degree at a time
    Matrix A = detail::linear_matrix(V);
    Poly x1 = Poly::var(r, 0), Delta = Poly::var(r, 0) * Poly::var(r, 2, 2) - Poly::var(r, 1) * Poly::var(r, 1);
    for (long d = 2; d <= K; ++d) {
        long grade = d - 1;
        Poly sl = V.slice(g, grade).comp(1);
        if (!sl.is_zero()) {
            HomologicalSolver hs(r, A, 1, static_cast<int>(d));
            VectorField Y(r);
            Y.comp(1) = hs.solve(sl).generator;
            if (!Y.is_zero()) {
                VectorField before = V;
                V = record(tr, StepKind::Inner, grade, 1, Y, V, "inner");
                if (!unchanged_below(before, V, g, grade, 1, 3)) rescan = false, rescan_detail = "inner degree " + std::to_string(d);
            }
        }
        // coordinates in x1^(d-2m) Delta^m
        std::vector<Poly> kb;
        for (long m = 0; 2 * m <= d; ++m) {
            Poly f = Poly::constant(r, 1);
            for (long i = 0; i < d - 2 * m; ++i) f = f * x1;
            for (long i = 0; i < m; ++i) f = f * Delta;
            kb.push_back(f);
        }
        MonomialIndex idx(monomial_basis(r, 1, static_cast<int>(d)));
        Matrix KB(idx.basis.size(), kb.size());
        for (std::size_t j = 0; j < kb.size(); ++j) {
            auto col = idx.coords(kb[j]);
            for (std::size_t i = 0; i < col.size(); ++i) KB(i, j) = col[i];
        }
        auto coeffs = solve_any(KB, idx.coords(V.slice(g, grade).comp(1)));
        if (!coeffs) throw std::logic_error("component 1 slice left the invariant ring");
        for (long m = static_cast<long>(kb.size()) - 1; m >= 1; --m) {
            Scalar a = (*coeffs)[m];
            if (a == 0) continue;
            long l = d - 2 * m;
            Poly base = Poly::var(r, 1);
            for (long i = 0; i < l; ++i) base = base * x1;
            for (long i = 0; i < m - 1; ++i) base = base * Delta;
            OuterGenerator o = zero_generator(r, 1), c = zero_generator(r, 1);
            o.ring_part = base;
            c.field_part.comp(1) = base * x1;
            std::vector<OuterGenerator> basis{o, c};
            Poly target = kb[m].scaled(-a);
            std::map<Monomial, int, GrlexGreater> mons;
            for (auto& [mm, cc] : target.terms()) mons[mm];
            for (auto& b : basis) {
                Poly img = rho(b, V, &tr.truncation).slice(g, grade).comp(1);
                for (auto& [mm, cc] : img.terms()) mons[mm];
            }
            std::vector<Position> pos;
            std::vector<Scalar> change;
            for (auto& [mm, cc] : mons) {
                pos.push_back({1, mm});
                change.push_back(target.coeff(mm));
            }
            auto x = solve_first_order(V, basis, pos, change, tr.truncation);
            VectorField before = V;
            V = record(tr, StepKind::Outer, grade, 1, combine(basis, x), V,
                       "x1^" + std::to_string(l) + " Delta^" + std::to_string(m));
            if (!unchanged_below(before, V, g, grade, 1, 3)) rescan = false, rescan_detail = "Delta step, degree " + std::to_string(d);
        }
        Scalar al = V.comp(1).coeff(M(static_cast<int>(d), 0, 0));
        if (V.slice(g, grade).comp(1) != Poly::term(r, M(static_cast<int>(d), 0, 0), al))
            throw std::logic_error("component 1 slice not reduced to a power of x1");
        if (d == 2) {
            res.a2 = al;
            if (al == 0) throw singular_binding("coefficient a2 of x1^2 vanishes after the inner normal form");
            continue;
        }
        if (al == 0) continue;
        OuterGenerator o = zero_generator(r, 1), c = zero_generator(r, 1);
        o.ring_part = Poly::term(r, M(static_cast<int>(d) - 2, 0, 0), 1);
        c.field_part.comp(1) = Poly::term(r, M(static_cast<int>(d) - 1, 0, 0), 1);
        std::vector<OuterGenerator> basis{o, c};
        std::vector<Position> pos{{1, M(static_cast<int>(d) - 2, 1, 0)}, {1, M(static_cast<int>(d), 0, 0)}};
        auto x = solve_first_order(V, basis, pos, {Scalar(0), -al}, tr.truncation);
        VectorField before = V;
        V = record(tr, StepKind::Outer, grade, 1, combine(basis, x), V, "x1^" + std::to_string(d));
        if (!unchanged_below(before, V, g, grade, 1, 3)) rescan = false, rescan_detail = "x1 power step, degree " + std::to_string(d);
    }
    tr.output = V;
    VectorField want(r);
    want.comp(1) = Poly::var(r, 1) + Poly::term(r, M(2, 0, 0), res.a2);
    want.comp(2) = Poly::var(r, 2) + Poly::term(r, M(0, 2, 0), res.b2);
    want.comp(3) = Poly::term(r, M(0, 0, 2), res.c2);
    tr.verdicts.push_back({"three_term", V == want, V == want ? "" : V.render()});
    tr.verdicts.push_back({"rescan", rescan, rescan_detail});
    return res;
}

} // namespace ffnf

#endif
