#ifndef FFNF_INNER_NF_HPP
#define FFNF_INNER_NF_HPP

#include "sl2.hpp"
#include "transform.hpp"

namespace ffnf {

namespace detail {

inline Monomial param_part(const Monomial& m, int n) {
    Monomial k(m.size(), 0);
    for (std::size_t s = n; s < m.size(); ++s) k[s] = m[s];
    return k;
}

inline Monomial state_part(const Monomial& m, int n) {
    Monomial k(m.size(), 0);
    for (int s = 0; s < n; ++s) k[s] = m[s];
    return k;
}

inline bool has_params(const Monomial& m, int n) {
    for (std::size_t s = n; s < m.size(); ++s)
        if (m[s]) return true;
    return false;
}

// f grouped by parameter monomial: param part -> state polynomial
inline std::map<Monomial, Poly, GrlexGreater> by_param(const Poly& f) {
    std::map<Monomial, Poly, GrlexGreater> g;
    int n = f.ring()->n;
    for (auto& [m, c] : f.terms()) {
        auto key = param_part(m, n);
        auto it = g.try_emplace(key, Poly(f.ring())).first;
        it->second.add_term(state_part(m, n), c);
    }
    return g;
}

inline Poly times_monomial(const Poly& f, const Monomial& k) {
    Poly r(f.ring());
    for (auto& [m, c] : f.terms()) {
        Monomial t = m;
        for (std::size_t s = 0; s < t.size(); ++s) t[s] += k[s];
        r.add_term(t, c);
    }
    return r;
}

// numeric matrix of the grade-0 (state-linear, parameter-free) part
inline Matrix linear_matrix(const VectorField& V) {
    int n = V.n();
    Matrix A(n, n);
    for (int p = 1; p <= n; ++p)
        for (auto& [m, c] : V.comp(p).terms()) {
            if (state_degree(m, n) != 1 || has_params(m, n)) continue;
            for (int q = 0; q < n; ++q)
                if (m[q]) A(p - 1, q) = c;
        }
    return A;
}

inline Poly numeric_constant(const Poly& f) {
    int n = f.ring()->n;
    return f.filter([&](const Monomial& m) { return total_degree(m) == 0 && n >= 0; });
}

} // namespace detail

// Solves f = T_p(g) + k with T_p(g) = L_A(g) - A_pp g, g over the generator basis, k over ker L_{M_p}.
class HomologicalSolver {
public:
    HomologicalSolver(const RingPtr& r, const Matrix& A, int p, int d) : r_(r), p_(p), d_(d),
        idx_(monomial_basis(r, p, d)) {
        gens_ = generator_basis(r, p, d);
        ker_ = kernel_basis(r, p, d);
        std::size_t m = idx_.basis.size();
        if (gens_.size() + ker_.size() != m) throw std::logic_error("homological solver: complement dimension mismatch");
        VectorField LA(r);
        for (int q = p; q <= r->n; ++q)
            for (int s = q; s <= r->n; ++s)
                if (A(q - 1, s - 1) != 0) LA.comp(q) += Poly::var(r, s - 1, A(q - 1, s - 1));
        Scalar app = A(p - 1, p - 1);
        Matrix M(m, m);
        for (std::size_t j = 0; j < gens_.size(); ++j) {
            Poly g = Poly::term(r, gens_[j], 1);
            auto c = idx_.coords(LA.apply(g) - g.scaled(app));
            for (std::size_t i = 0; i < m; ++i) M(i, j) = c[i];
        }
        for (std::size_t j = 0; j < ker_.size(); ++j) {
            auto c = idx_.coords(ker_[j]);
            for (std::size_t i = 0; i < m; ++i) M(i, gens_.size() + j) = c[i];
        }
        solver_ = SquareSolver(M);
        if (!solver_.invertible())
            throw singular_binding("homological operator is singular at component " + std::to_string(p) +
                                   ", degree " + std::to_string(d));
    }

    // f: state polynomial homogeneous of degree d in r^p
    Decomposition solve(const Poly& f) const {
        auto x = solver_.solve(idx_.coords(f));
        Decomposition out{Poly(r_), Poly(r_)};
        for (std::size_t j = 0; j < gens_.size(); ++j) out.generator.add_term(gens_[j], (*x)[j]);
        for (std::size_t j = 0; j < ker_.size(); ++j) out.kernel_part += ker_[j].scaled((*x)[gens_.size() + j]);
        return out;
    }

private:
    RingPtr r_;
    int p_, d_;
    MonomialIndex idx_;
    std::vector<Monomial> gens_;
    std::vector<Poly> ker_;
    SquareSolver solver_;
};

inline void require_triangular(const VectorField& X) {
    auto v = X.validate_triangular();
    if (!v.empty())
        throw std::invalid_argument("non-triangular input: component " + std::to_string(v[0].component) +
                                    " contains " + v[0].monomial);
}

// Removes numeric constants from components 1..n-1 by translations along the next coordinate.
inline NormalFormTrace constant_normalize(const VectorField& X, long K) {
    require_triangular(X);
    NormalFormTrace tr;
    tr.input = X;
    tr.truncation = Truncation::degree(X.ring(), K);
    tr.truncation_degree = K;
    VectorField V = X.truncated(tr.truncation);
    int n = V.n();
    for (int round = 0; round < n + K + 2; ++round) {
        Matrix A = detail::linear_matrix(V);
        VectorField Y(V.ring());
        bool any = false;
        for (int j = 1; j < n; ++j) {
            Scalar nu = detail::numeric_constant(V.comp(j)).coeff(Monomial(V.ring()->nvars(), 0));
            if (nu == 0) continue;
            Scalar s = A(j - 1, j);
            Y.comp(j + 1) += Poly::constant(V.ring(), -checked_div(nu, s, "superdiagonal coefficient"));
            any = true;
        }
        if (!any) break;
        int lo = 1;
        while (Y.comp(lo).is_zero()) ++lo;
        V = record(tr, StepKind::Constant, -1, lo, Y, V, "translation");
    }
    for (int j = 1; j < n; ++j)
        if (!detail::numeric_constant(V.comp(j)).is_zero()) tr.notes.push_back("residual constant in component " + std::to_string(j));
    tr.output = V;
    return tr;
}

struct InnerOptions {
    bool tau_basis = false;
    bool check = true;
};

namespace detail {

inline void inner_membership(NormalFormTrace& tr, const VectorField& out) {
    int n = out.n();
    const RingPtr& r = out.ring();
    Grading g = Grading::delta1(r);
    bool lin_ok = true, const_ok = true, ker_ok = true;
    std::string detail;
    for (int p = 1; p <= n; ++p) {
        auto t = build_sl2(r, p);
        for (auto& [m, c] : out.comp(p).terms()) {
            long sd = state_degree(m, n);
            if (sd == 1 && !has_params(m, n)) {
                int q = 0;
                while (!m[q]) ++q;
                if (q + 1 > p + 1) lin_ok = false, detail = "linear term x" + std::to_string(q + 1) + " in component " + std::to_string(p);
            }
            if (sd == 0 && p < n) const_ok = false, detail = "constant in component " + std::to_string(p);
        }
        long hi = out.max_grade(g);
        for (long d = 1; d <= hi; ++d) {
            Poly sl = out.slice(g, d).comp(p).filter([&](const Monomial& m) { return state_degree(m, n) >= 1; });
            if (!t.M.apply(sl).is_zero()) {
                ker_ok = false;
                detail = "L_M(slice) != 0 at component " + std::to_string(p) + ", grade " + std::to_string(d);
            }
        }
    }
    tr.verdicts.push_back({"membership", ker_ok && lin_ok && const_ok, detail});
}

} // namespace detail

// Grade-by-grade normalization of X under truncation t (grades measured by delta1 of X's ring).
inline NormalFormTrace inner_normalize(const VectorField& X, const Truncation& t, InnerOptions opt = {}) {
    require_triangular(X);
    const RingPtr& r = X.ring();
    int n = r->n;
    for (std::size_t j = 0; j < r->param_names.size(); ++j)
        if (r->param_grades[j] <= 0)
            throw std::invalid_argument("parameter " + r->param_names[j] + " has grade 0; bind it to a rational or declare a positive grade");

    NormalFormTrace tr;
    tr.input = X;
    tr.truncation = t;
    tr.residual_basis = opt.tau_basis ? "tau" : "echelon";
    VectorField V = X.truncated(t);
    Grading g = Grading::delta1(r);

    // numeric constants
    bool has_const = false;
    for (int j = 1; j < n; ++j)
        if (!detail::numeric_constant(V.comp(j)).is_zero()) has_const = true;
    if (has_const) {
        auto ct = constant_normalize(V, LONG_MAX / 8);
        for (auto& s : ct.steps) {
            V = record(tr, s.kind, s.grade, s.component, s.generator, V, s.label);
        }
    }
    for (int j = 1; j <= n; ++j)
        if (!detail::numeric_constant(V.comp(j)).is_zero())
            throw std::invalid_argument("numeric constant term in component " + std::to_string(j) +
                                        " cannot be graded; declare it through a graded parameter");

    // grade 0: remove x_q d_p for q >= p+2
    Matrix A = detail::linear_matrix(V);
    for (int p = n - 2; p >= 1; --p) {
        A = detail::linear_matrix(V);
        int m = n - p - 1;  // unknowns c_j for j = p+1..n-1, equations for q = p+2..n
        bool need = false;
        for (int q = p + 2; q <= n; ++q)
            if (A(p - 1, q - 1) != 0) need = true;
        if (!need) continue;
        Matrix S(m, m);
        std::vector<Scalar> rhs(m);
        for (int qi = 0; qi < m; ++qi) {
            int q = p + 2 + qi;
            rhs[qi] = A(p - 1, q - 1);
            for (int ji = 0; ji < m; ++ji) {
                int j = p + 1 + ji;
                S(qi, ji) = A(j - 1, q - 1) - (j == q ? A(p - 1, p - 1) : Scalar(0));
            }
        }
        auto x = SquareSolver(S).solve(rhs);
        if (!x) throw singular_binding("linear normalization is singular at component " + std::to_string(p));
        VectorField Y(r);
        for (int ji = 0; ji < m; ++ji) Y.comp(p) += Poly::var(r, p + ji, (*x)[ji]);
        V = record(tr, StepKind::Linear, 0, p, Y, V, "linear");
    }
    A = detail::linear_matrix(V);

    std::map<std::pair<int, int>, std::unique_ptr<HomologicalSolver>> cache;
    auto solver = [&](int p, int d) -> const HomologicalSolver& {
        auto& s = cache[{p, d}];
        if (!s) s = std::make_unique<HomologicalSolver>(r, A, p, d);
        return *s;
    };

    for (long d = 1; d <= V.max_grade(g); ++d) {
        // graded constants of this grade, ascending so that spill lands in later components
        for (int j = 1; j < n; ++j) {
            Poly c = V.slice(g, d).comp(j).filter([&](const Monomial& m) { return state_degree(m, n) == 0; });
            if (c.is_zero()) continue;
            VectorField Y(r);
            Y.comp(j + 1) = c.scaled(-checked_div(Scalar(1), A(j - 1, j), "superdiagonal coefficient"));
            V = record(tr, StepKind::Constant, d, j + 1, Y, V, "graded constant");
        }
        for (int p = n - 1; p >= 1; --p) {
            Poly sl = V.slice(g, d).comp(p).filter([&](const Monomial& m) { return state_degree(m, n) >= 1; });
            if (sl.is_zero()) continue;
            VectorField Y(r);
            for (auto& [k, f] : detail::by_param(sl)) {
                long sd = f.max_state_degree();
                auto dec = solver(p, static_cast<int>(sd)).solve(f);
                Y.comp(p) += detail::times_monomial(dec.generator, k);
            }
            if (Y.is_zero()) continue;
            V = record(tr, StepKind::Inner, d, p, Y, V, "homological");
        }
    }
    tr.output = V;
    if (opt.check) detail::inner_membership(tr, V);
    return tr;
}

inline NormalFormTrace inner_normalize(const VectorField& X, long K, InnerOptions opt = {}) {
    auto tr = inner_normalize(X, Truncation::degree(X.ring(), K), opt);
    tr.truncation_degree = K;
    return tr;
}

} // namespace ffnf

#endif
