#ifndef FFNF_VECTOR_FIELD_HPP
#define FFNF_VECTOR_FIELD_HPP

#include "poly.hpp"

#include <climits>
#include <sstream>

namespace ffnf {

// Weights per variable slot. Field term m*d_p has grade wdeg(m) - w[p]; ring terms have grade wdeg(m).
struct Grading {
    std::vector<int> w;

    static Grading delta1(const RingPtr& r) {
        Grading g;
        g.w.assign(r->nvars(), 1);
        for (std::size_t j = 0; j < r->param_grades.size(); ++j) g.w[r->n + j] = r->param_grades[j];
        return g;
    }
    // s: weights of x1..xn
    static Grading delta2(const RingPtr& r, const std::vector<int>& s) {
        if (s.size() != static_cast<std::size_t>(r->n)) throw std::invalid_argument("delta2 weight vector length");
        Grading g = delta1(r);
        for (int i = 0; i < r->n; ++i) g.w[i] = s[i];
        return g;
    }

    long field_grade(const Monomial& m, int comp) const { return weighted_degree(m, w) - w[comp]; }
    long ring_grade(const Monomial& m) const { return weighted_degree(m, w); }
    bool operator==(const Grading& o) const { return w == o.w; }
};

struct Truncation {
    Grading g;
    long max_grade = LONG_MAX / 4;

    // state-degree truncation at K under delta1
    static Truncation degree(const RingPtr& r, long K) { return {Grading::delta1(r), K - 1}; }
    static Truncation none(const RingPtr& r) { return {Grading::delta1(r), LONG_MAX / 4}; }

    long cap_for(int comp) const { return max_grade + g.w[comp]; }
    bool keep_ring(const Monomial& m) const { return g.ring_grade(m) <= max_grade; }
};

struct TriangularityViolation {
    int component;    // 1-based
    std::string monomial;
    int variable;     // 1-based offending x_q, q < component
};

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(RingPtr r) : ring_(r), c_(r->n, Poly(r)) {}
    VectorField(RingPtr r, std::vector<Poly> comps) : ring_(std::move(r)), c_(std::move(comps)) {
        if (c_.size() != static_cast<std::size_t>(ring_->n)) throw std::invalid_argument("component count must equal n");
        for (auto& p : c_)
            if (!p.ring()) p = Poly(ring_);
            else if (!same_ring(p.ring(), ring_)) throw std::invalid_argument("component ring mismatch");
    }

    const RingPtr& ring() const { return ring_; }
    int n() const { return ring_->n; }

    // 1-based component access
    const Poly& comp(int p) const { return c_.at(p - 1); }
    Poly& comp(int p) { return c_.at(p - 1); }
    const std::vector<Poly>& comps() const { return c_; }

    // block bounds p_1=1 < ... < p_{m+1}=n+1; empty means fully triangular
    const std::vector<int>& blocks() const { return blocks_; }
    void set_blocks(std::vector<int> b) {
        if (!b.empty()) {
            if (b.front() != 1 || b.back() != n() + 1) throw std::invalid_argument("block bounds must start at 1 and end at n+1");
            for (std::size_t i = 1; i < b.size(); ++i)
                if (b[i] <= b[i - 1]) throw std::invalid_argument("block bounds must increase");
        }
        blocks_ = std::move(b);
    }
    std::vector<int> bounds() const {
        if (!blocks_.empty()) return blocks_;
        std::vector<int> b;
        for (int i = 1; i <= n() + 1; ++i) b.push_back(i);
        return b;
    }
    int block_of(int p) const {
        auto b = bounds();
        for (std::size_t i = 0; i + 1 < b.size(); ++i)
            if (p >= b[i] && p < b[i + 1]) return static_cast<int>(i) + 1;
        throw std::out_of_range("component outside blocks");
    }

    bool is_zero() const {
        for (auto& p : c_)
            if (!p.is_zero()) return false;
        return true;
    }
    bool operator==(const VectorField& o) const { return c_.size() == o.c_.size() && c_ == o.c_; }
    bool operator!=(const VectorField& o) const { return !(*this == o); }

    VectorField& operator+=(const VectorField& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    VectorField& operator-=(const VectorField& o) {
        check(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
    friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
    VectorField scaled(const Scalar& s) const {
        VectorField r = *this;
        for (auto& p : r.c_) p = p.scaled(s);
        return r;
    }

    // derivation action X(f) = sum_q X_q df/dx_q
    Poly apply(const Poly& f) const { return apply_capped(f, nullptr, 0); }
    Poly apply_capped(const Poly& f, const std::vector<int>* w, long cap) const {
        Poly r(ring_);
        for (int q = 0; q < n(); ++q) {
            if (c_[q].is_zero()) continue;
            Poly d = f.derivative(q);
            if (d.is_zero()) continue;
            r += w ? c_[q].mul_capped(d, *w, cap) : c_[q] * d;
        }
        return r;
    }

    VectorField truncated(const Truncation& t) const {
        VectorField r = *this;
        for (int p = 0; p < n(); ++p) {
            long cap = t.cap_for(p);
            r.c_[p] = c_[p].filter([&](const Monomial& m) { return weighted_degree(m, t.g.w) <= cap; });
        }
        return r;
    }

    // only terms of the given grade
    VectorField slice(const Grading& g, long d) const {
        VectorField r = *this;
        for (int p = 0; p < n(); ++p)
            r.c_[p] = c_[p].filter([&](const Monomial& m) { return g.field_grade(m, p) == d; });
        return r;
    }

    long min_grade(const Grading& g) const {
        long lo = LONG_MAX;
        for (int p = 0; p < n(); ++p)
            for (auto& [m, c] : c_[p].terms()) lo = std::min(lo, g.field_grade(m, p));
        return lo;
    }
    long max_grade(const Grading& g) const {
        long hi = LONG_MIN;
        for (int p = 0; p < n(); ++p)
            for (auto& [m, c] : c_[p].terms()) hi = std::max(hi, g.field_grade(m, p));
        return hi;
    }

    std::vector<TriangularityViolation> validate_triangular() const {
        std::vector<TriangularityViolation> out;
        auto b = bounds();
        for (int p = 1; p <= n(); ++p) {
            int lo = b[block_of(p) - 1];
            for (auto& [m, c] : comp(p).terms())
                for (int q = 1; q < lo; ++q)
                    if (m[q - 1]) {
                        out.push_back({p, comp(p).render_monomial(m), q});
                        break;
                    }
        }
        return out;
    }
    bool is_triangular() const { return validate_triangular().empty(); }

    std::string render() const {
        std::ostringstream os;
        for (int p = 1; p <= n(); ++p) os << "x" << p << "' = " << comp(p).render() << "\n";
        return os.str();
    }

private:
    void check(const VectorField& o) const {
        if (o.n() != n()) throw std::invalid_argument("dimension mismatch");
    }

    RingPtr ring_;
    std::vector<Poly> c_;
    std::vector<int> blocks_;
};

// [X,Y]_p = sum_q X_q dY_p/dx_q - Y_q dX_p/dx_q, optionally truncated while multiplying
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y, const Truncation* t = nullptr) {
    if (X.n() != Y.n()) throw std::invalid_argument("dimension mismatch");
    VectorField R(X.ring());
    int n = X.n();
    for (int p = 1; p <= n; ++p) {
        long cap = t ? t->cap_for(p - 1) : 0;
        const std::vector<int>* w = t ? &t->g.w : nullptr;
        Poly acc = X.apply_capped(Y.comp(p), w, cap);
        acc -= Y.apply_capped(X.comp(p), w, cap);
        R.comp(p) = std::move(acc);
    }
    R.set_blocks(X.blocks().empty() ? Y.blocks() : X.blocks());
    return R;
}

// Highest block index carrying a nonzero component (0 if the field vanishes).
inline int support_block(const VectorField& X) {
    int hi = 0;
    for (int p = 1; p <= X.n(); ++p)
        if (!X.comp(p).is_zero()) hi = std::max(hi, X.block_of(p));
    return hi;
}

// [t^i, t^j] lands in blocks <= min(i,j)
inline bool min_tropical_check(const VectorField& X, const VectorField& Y) {
    int i = support_block(X), j = support_block(Y);
    if (i == 0 || j == 0) return true;
    VectorField B = lie_bracket(X, Y);
    int lim = std::min(i, j);
    for (int p = 1; p <= B.n(); ++p)
        if (!B.comp(p).is_zero() && X.block_of(p) > lim) return false;
    return true;
}

inline VectorField field_from(const RingPtr& r, std::initializer_list<Poly> comps) {
    return VectorField(r, std::vector<Poly>(comps));
}

} // namespace ffnf

#endif
