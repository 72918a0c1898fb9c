#ifndef FFNF_SL2_HPP
#define FFNF_SL2_HPP

#include "linalg.hpp"
#include "vector_field.hpp"

#include <algorithm>
#include <unordered_map>

namespace ffnf {

struct Sl2Triple {
    int n = 0, p = 0;
    VectorField N, H, M;
};

inline Sl2Triple build_sl2(const RingPtr& r, int p) {
    int n = r->n;
    if (p < 1 || p > n) throw std::out_of_range("component index out of range");
    Sl2Triple t{n, p, VectorField(r), VectorField(r), VectorField(r)};
    for (int i = p; i <= n - 1; ++i) t.N.comp(i) = Poly::var(r, i);
    for (int i = p; i <= n; ++i) t.H.comp(i) = Poly::var(r, i - 1, Scalar(n + p - 2 * i));
    for (int i = p + 1; i <= n; ++i) t.M.comp(i) = Poly::var(r, i - 2, Scalar((i - p) * (n - i + 1)));
    return t;
}

inline Sl2Triple build_sl2(int n, int p) { return build_sl2(make_ring(n), p); }

struct Sl2Relations {
    bool mn = false, hn = false, hm = false;  // [M,N]=H, [H,N]=-2N, [H,M]=2M
    bool all() const { return mn && hn && hm; }
};

inline Sl2Relations check_sl2_relations(const Sl2Triple& t) {
    return {lie_bracket(t.M, t.N) == t.H, lie_bracket(t.H, t.N) == t.N.scaled(-2), lie_bracket(t.H, t.M) == t.M.scaled(2)};
}

enum class LOp { N, H, M };

inline void require_in_rp(const Poly& f, int p) {
    if (f.min_state_var() < p - 1)
        throw std::invalid_argument("polynomial uses x" + std::to_string(f.min_state_var() + 1) +
                                    " below component " + std::to_string(p));
}

inline Poly l_operator(LOp which, const Sl2Triple& t, const Poly& f) {
    require_in_rp(f, t.p);
    const VectorField& X = which == LOp::N ? t.N : which == LOp::H ? t.H : t.M;
    return X.apply(f);
}

// H_p eigenvalue of a monomial over x_p..x_n
inline long weight_of(const Monomial& m, int n, int p) {
    long w = 0;
    for (int q = 1; q <= n; ++q) {
        if (!m[q - 1]) continue;
        if (q < p) throw std::invalid_argument("monomial uses a variable below the component");
        w += static_cast<long>(m[q - 1]) * (n + p - 2 * q);
    }
    return w;
}
inline long weight_of(const Monomial& m, const Sl2Triple& t) { return weight_of(m, t.n, t.p); }

// Weight of a weight-homogeneous polynomial; throws otherwise.
inline long poly_weight(const Poly& f, int n, int p) {
    if (f.is_zero()) throw std::invalid_argument("zero polynomial has no weight");
    long w = 0;
    bool first = true;
    for (auto& [m, c] : f.terms()) {
        long x = weight_of(m, n, p);
        if (first) w = x, first = false;
        else if (x != w) throw std::invalid_argument("polynomial is not weight-homogeneous");
    }
    return w;
}

// State monomials of degree d in x_p..x_n (parameter slots zero), descending grlex.
inline std::vector<Monomial> monomial_basis(const RingPtr& r, int p, int d) {
    std::vector<Monomial> out;
    Monomial m(r->nvars(), 0);
    int n = r->n;
    std::function<void(int, int)> rec = [&](int q, int left) {
        if (q == n) {
            if (left == 0) out.push_back(m);
            return;
        }
        if (q == n - 1) {
            m[q] = static_cast<std::uint16_t>(left);
            out.push_back(m);
            m[q] = 0;
            return;
        }
        for (int e = left; e >= 0; --e) {
            m[q] = static_cast<std::uint16_t>(e);
            rec(q + 1, left - e);
        }
        m[q] = 0;
    };
    if (d >= 0 && p >= 1 && p <= n) rec(p - 1, d);
    std::sort(out.begin(), out.end(), GrlexGreater{});
    return out;
}

struct MonomialIndex {
    std::vector<Monomial> basis;
    std::map<Monomial, std::size_t> index;

    explicit MonomialIndex(std::vector<Monomial> b) : basis(std::move(b)) {
        for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);
    }
    std::vector<Scalar> coords(const Poly& f) const {
        std::vector<Scalar> v(basis.size());
        for (auto& [m, c] : f.terms()) {
            auto it = index.find(m);
            if (it == index.end()) throw std::logic_error("term " + f.render_monomial(m) + " outside the monomial basis");
            v[it->second] = c;
        }
        return v;
    }
    Poly poly(const RingPtr& r, const std::vector<Scalar>& v) const {
        Poly f(r);
        for (std::size_t i = 0; i < v.size(); ++i) f.add_term(basis[i], v[i]);
        return f;
    }
};

inline Matrix operator_matrix(const MonomialIndex& dom, const MonomialIndex& cod, const RingPtr& r,
                              const std::function<Poly(const Poly&)>& op) {
    Matrix m(cod.basis.size(), dom.basis.size());
    for (std::size_t j = 0; j < dom.basis.size(); ++j) {
        auto v = cod.coords(op(Poly::term(r, dom.basis[j], 1)));
        for (std::size_t i = 0; i < v.size(); ++i) m(i, j) = v[i];
    }
    return m;
}

// Kernel of L_{M_p} on degree-d polynomials of r^p, as reduced echelon rows in the descending monomial basis.
inline std::vector<Poly> kernel_basis(const RingPtr& r, int p, int d) {
    auto t = build_sl2(r, p);
    MonomialIndex idx(monomial_basis(r, p, d));
    Matrix LM = operator_matrix(idx, idx, r, [&](const Poly& f) { return t.M.apply(f); });
    auto rows = echelon_rows(nullspace(LM), idx.basis.size());
    std::vector<Poly> out;
    for (auto& v : rows) out.push_back(idx.poly(r, v));
    return out;
}
inline std::vector<Poly> kernel_basis(int n, int p, int d) { return kernel_basis(make_ring(n), p, d); }

// Monomials whose L_{N_p} images are independent, greedily scanned from the smallest monomial upward.
inline std::vector<Monomial> generator_basis(const RingPtr& r, int p, int d) {
    auto t = build_sl2(r, p);
    MonomialIndex idx(monomial_basis(r, p, d));
    Matrix LN = operator_matrix(idx, idx, r, [&](const Poly& f) { return t.N.apply(f); });
    std::vector<Monomial> picked;
    IncrementalBasis ib(idx.basis.size());
    for (std::size_t k = idx.basis.size(); k-- > 0;) {
        std::vector<Scalar> col(idx.basis.size());
        for (std::size_t i = 0; i < col.size(); ++i) col[i] = LN(i, k);
        if (ib.insert(std::move(col))) picked.push_back(idx.basis[k]);
    }
    return picked;
}

struct TauInvariant {
    int n = 0, p = 0, k = 0;
    Poly poly;
    long weight = 0;
};

inline TauInvariant tau_closed_form(const RingPtr& r, int p, int k) {
    int n = r->n;
    if (p < 1 || p > n) throw std::out_of_range("component index out of range");
    if (k < 0 || k > n - p) throw std::out_of_range("tau order out of range");
    TauInvariant t{n, p, k, Poly(r), 2L * (n - p) - 2L * k};
    if (k % 2) return t;
    int w = n - p;
    for (int j = 0; j <= k; ++j) {
        Scalar c = binom(w - (k - j), j) * binom(w - j, k - j);
        if ((k - j) % 2) c = -c;
        t.poly += Poly::var(r, p + k - j - 1) * Poly::var(r, p + j - 1, c);
    }
    return t;
}
inline TauInvariant tau_closed_form(int n, int p, int k) { return tau_closed_form(make_ring(n), p, k); }

inline std::vector<Poly> tau_basis(const RingPtr& r, int p) {
    std::vector<Poly> out;
    for (int k = 0; k <= r->n - p; k += 2) out.push_back(tau_closed_form(r, p, k).poly);
    return out;
}

inline Poly transvectant(const Poly& f, const Poly& g, int k, const Sl2Triple& t) {
    RingPtr r = f.ring() ? f.ring() : g.ring();
    if (f.is_zero() || g.is_zero()) return Poly(r);
    long wf = poly_weight(f, t.n, t.p), wg = poly_weight(g, t.n, t.p);
    std::vector<Poly> fd{f}, gd{g};
    for (int i = 1; i <= k; ++i) {
        fd.push_back(t.N.apply(fd.back()));
        gd.push_back(t.N.apply(gd.back()));
    }
    Poly out(r);
    for (int i = 0; i <= k; ++i) {
        int j = k - i;
        Scalar c = binom(wf - i, k - i) * binom(wg - j, k - j);
        if (i % 2) c = -c;
        if (c == 0) continue;
        out += (fd[i] * gd[j]).scaled(c);
    }
    return out;
}

struct Decomposition {
    Poly generator;
    Poly kernel_part;
};

// v = L_{N_p}(generator) + kernel_part, generator restricted to generator_basis
inline Decomposition decompose(const Poly& v, int p, int d) {
    const RingPtr& r = v.ring();
    auto t = build_sl2(r, p);
    MonomialIndex idx(monomial_basis(r, p, d));
    auto gens = generator_basis(r, p, d);
    auto ker = kernel_basis(r, p, d);
    std::size_t m = idx.basis.size();
    if (gens.size() + ker.size() != m) throw std::logic_error("decompose: complement dimension mismatch");
    Matrix A(m, m);
    for (std::size_t j = 0; j < gens.size(); ++j) {
        auto c = idx.coords(t.N.apply(Poly::term(r, gens[j], 1)));
        for (std::size_t i = 0; i < m; ++i) A(i, j) = c[i];
    }
    for (std::size_t j = 0; j < ker.size(); ++j) {
        auto c = idx.coords(ker[j]);
        for (std::size_t i = 0; i < m; ++i) A(i, gens.size() + j) = c[i];
    }
    auto x = SquareSolver(A).solve(idx.coords(v));
    if (!x) throw std::logic_error("decompose: inconsistent system");
    Decomposition out{Poly(r), Poly(r)};
    for (std::size_t j = 0; j < gens.size(); ++j) out.generator.add_term(gens[j], (*x)[j]);
    for (std::size_t j = 0; j < ker.size(); ++j) out.kernel_part += ker[j].scaled((*x)[gens.size() + j]);
    return out;
}

// Coordinates of a degree-2 kernel element in the tau basis (tau^0, tau^2, ...).
inline std::vector<Scalar> tau_coordinates(const Poly& f, int p) {
    const RingPtr& r = f.ring();
    auto basis = tau_basis(r, p);
    MonomialIndex idx(monomial_basis(r, p, 2));
    Matrix A(idx.basis.size(), basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        auto c = idx.coords(basis[j]);
        for (std::size_t i = 0; i < c.size(); ++i) A(i, j) = c[i];
    }
    auto x = solve_any(A, idx.coords(f));
    if (!x) throw std::invalid_argument("polynomial is not in the span of the tau basis");
    return *x;
}

} // namespace ffnf

#endif
