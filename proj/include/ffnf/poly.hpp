#ifndef FFNF_POLY_HPP
#define FFNF_POLY_HPP

#include "scalar.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ffnf {

// Variable slots: x1..xn first, then parameters.
struct Ring {
    int n = 0;
    std::vector<std::string> state_names;
    std::vector<std::string> param_names;
    std::vector<int> param_grades;

    std::size_t nvars() const { return static_cast<std::size_t>(n) + param_names.size(); }

    int slot_of(const std::string& name) const {
        for (int i = 0; i < n; ++i)
            if (state_names[i] == name) return i;
        for (std::size_t j = 0; j < param_names.size(); ++j)
            if (param_names[j] == name) return n + static_cast<int>(j);
        return -1;
    }

    const std::string& name_of(std::size_t slot) const {
        return slot < static_cast<std::size_t>(n) ? state_names[slot] : param_names[slot - n];
    }

    bool operator==(const Ring& o) const {
        return n == o.n && state_names == o.state_names && param_names == o.param_names &&
               param_grades == o.param_grades;
    }
};

using RingPtr = std::shared_ptr<const Ring>;

inline RingPtr make_ring(int n, std::vector<std::string> params = {}, std::vector<int> grades = {}) {
    if (n < 1) throw std::invalid_argument("ring dimension must be >= 1");
    auto r = std::make_shared<Ring>();
    r->n = n;
    for (int i = 1; i <= n; ++i) r->state_names.push_back("x" + std::to_string(i));
    if (grades.empty()) grades.assign(params.size(), 0);
    if (grades.size() != params.size()) throw std::invalid_argument("parameter grade list length mismatch");
    r->param_names = std::move(params);
    r->param_grades = std::move(grades);
    for (std::size_t i = 0; i < r->nvars(); ++i)
        for (std::size_t j = i + 1; j < r->nvars(); ++j)
            if (r->name_of(i) == r->name_of(j)) throw std::invalid_argument("duplicate variable name " + r->name_of(i));
    return r;
}

inline bool same_ring(const RingPtr& a, const RingPtr& b) {
    return a == b || (a && b && *a == *b);
}

using Monomial = std::vector<std::uint16_t>;

inline long total_degree(const Monomial& m) {
    long d = 0;
    for (auto e : m) d += e;
    return d;
}

inline long state_degree(const Monomial& m, int n) {
    long d = 0;
    for (int i = 0; i < n; ++i) d += m[i];
    return d;
}

inline long weighted_degree(const Monomial& m, const std::vector<int>& w) {
    long d = 0;
    for (std::size_t i = 0; i < m.size(); ++i) d += static_cast<long>(m[i]) * w[i];
    return d;
}

// descending graded-lex: larger total degree first, then x1 > x2 > ... > params
struct GrlexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const {
        long da = total_degree(a), db = total_degree(b);
        if (da != db) return da > db;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] > b[i];
        return false;
    }
};

class Poly {
public:
    using Terms = std::map<Monomial, Scalar, GrlexGreater>;

    Poly() = default;
    explicit Poly(RingPtr r) : ring_(std::move(r)) {}

    static Poly constant(RingPtr r, const Scalar& c) {
        Poly p(r);
        p.add_term(Monomial(r->nvars(), 0), c);
        return p;
    }
    static Poly var(RingPtr r, std::size_t slot, const Scalar& c = 1) {
        Monomial m(r->nvars(), 0);
        m.at(slot) = 1;
        Poly p(r);
        p.add_term(m, c);
        return p;
    }
    static Poly term(RingPtr r, Monomial m, const Scalar& c) {
        Poly p(r);
        p.add_term(m, c);
        return p;
    }

    const RingPtr& ring() const { return ring_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Scalar coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Scalar(0) : it->second;
    }

    void add_term(const Monomial& m, const Scalar& c) {
        if (c == 0) return;
        if (ring_ && m.size() != ring_->nvars()) throw std::invalid_argument("monomial length does not match ring");
        auto [it, fresh] = terms_.try_emplace(m, c);
        if (fresh) it->second.canonicalize();
        else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        check(o);
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        check(o);
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    Poly operator-() const {
        Poly r(ring_);
        for (auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    Poly scaled(const Scalar& s) const {
        Poly r(ring_);
        if (s == 0) return r;
        Scalar k = s;
        k.canonicalize();
        for (auto& [m, c] : terms_) r.terms_.emplace(m, c * k);
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) { return a.mul_if(b, nullptr); }

    // product keeping only monomials with weighted degree <= cap
    Poly mul_capped(const Poly& b, const std::vector<int>& w, long cap) const {
        return mul_if(b, [&](const Monomial& m) { return weighted_degree(m, w) <= cap; });
    }

    bool operator==(const Poly& o) const {
        if (terms_.size() != o.terms_.size()) return false;
        if (!terms_.empty() && !same_ring(ring_, o.ring_)) return false;
        auto it = o.terms_.begin();
        for (auto& [m, c] : terms_) {
            if (m != it->first || c != it->second) return false;
            ++it;
        }
        return true;
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly derivative(int var) const {
        if (var < 0 || var >= ring_->n) throw std::invalid_argument("derivative only by state variables");
        Poly r(ring_);
        for (auto& [m, c] : terms_) {
            if (m[var] == 0) continue;
            Monomial d = m;
            d[var] -= 1;
            r.add_term(d, c * m[var]);
        }
        return r;
    }

    Poly filter(const std::function<bool(const Monomial&)>& keep) const {
        Poly r(ring_);
        for (auto& [m, c] : terms_)
            if (keep(m)) r.terms_.emplace(m, c);
        return r;
    }

    Poly homogeneous(long d) const {
        int n = ring_->n;
        return filter([&](const Monomial& m) { return state_degree(m, n) == d; });
    }

    Poly weighted_slice(const std::vector<int>& w, long d) const {
        return filter([&](const Monomial& m) { return weighted_degree(m, w) == d; });
    }

    // lowest state variable index present (0-based), or n if the polynomial is state-free
    int min_state_var() const {
        int lo = ring_ ? ring_->n : 0;
        for (auto& [m, c] : terms_)
            for (int i = 0; i < lo; ++i)
                if (m[i]) {
                    lo = i;
                    break;
                }
        return lo;
    }

    long max_state_degree() const {
        long d = -1;
        for (auto& [m, c] : terms_) d = std::max(d, state_degree(m, ring_->n));
        return d;
    }

    bool uses_params() const {
        for (auto& [m, c] : terms_)
            for (std::size_t i = ring_->n; i < m.size(); ++i)
                if (m[i]) return true;
        return false;
    }

    // Maps this polynomial into `target`: state slots by index, parameters by name or by binding.
    Poly substitute(const std::map<std::string, Scalar>& binding, const RingPtr& target) const {
        if (target->n != ring_->n) throw std::invalid_argument("substitute: state dimension mismatch");
        std::vector<int> dest(ring_->nvars(), -1);
        std::vector<const Scalar*> val(ring_->nvars(), nullptr);
        for (int i = 0; i < ring_->n; ++i) dest[i] = i;
        for (std::size_t j = 0; j < ring_->param_names.size(); ++j) {
            const auto& nm = ring_->param_names[j];
            auto b = binding.find(nm);
            if (b != binding.end())
                val[ring_->n + j] = &b->second;
            else
                dest[ring_->n + j] = target->slot_of(nm);
        }
        Poly r(target);
        for (auto& [m, c] : terms_) {
            Monomial t(target->nvars(), 0);
            Scalar k = c;
            for (std::size_t s = 0; s < m.size(); ++s) {
                if (!m[s]) continue;
                if (val[s])
                    k *= ffnf::pow(*val[s], m[s]);
                else if (dest[s] >= 0)
                    t[dest[s]] += m[s];
                else
                    throw std::invalid_argument("unbound parameter " + ring_->name_of(s));
            }
            r.add_term(t, k);
        }
        return r;
    }

    // p(images[0], ..., images[n-1]) with parameters untouched; terms beyond `cap` dropped
    Poly compose(const std::vector<Poly>& images, const std::vector<int>& w, long cap) const {
        int n = ring_->n;
        Poly r(ring_);
        std::vector<std::vector<Poly>> powers(n);
        for (auto& [m, c] : terms_) {
            Monomial pm(m.size(), 0);
            for (std::size_t s = n; s < m.size(); ++s) pm[s] = m[s];
            Poly acc = Poly::term(ring_, pm, c);
            for (int i = 0; i < n && !acc.is_zero(); ++i) {
                if (!m[i]) continue;
                auto& pw = powers[i];
                if (pw.empty()) pw.push_back(Poly::constant(ring_, 1));
                while (pw.size() <= m[i]) pw.push_back(pw.back().mul_capped(images[i], w, cap));
                acc = acc.mul_capped(pw[m[i]], w, cap);
            }
            r += acc;
        }
        return r;
    }

    std::string render() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto& [m, c] : terms_) {
            bool neg = c < 0;
            Scalar a = neg ? Scalar(-c) : c;
            std::string mono = render_monomial(m);
            if (first)
                out += neg ? "-" : "";
            else
                out += neg ? " - " : " + ";
            if (mono.empty())
                out += to_string(a);
            else if (a == 1)
                out += mono;
            else
                out += to_string(a) + "*" + mono;
            first = false;
        }
        return out;
    }

    std::string render_monomial(const Monomial& m) const {
        std::string s;
        auto put = [&](std::size_t slot) {
            if (!m[slot]) return;
            if (!s.empty()) s += "*";
            s += ring_->name_of(slot);
            if (m[slot] > 1) s += "^" + std::to_string(m[slot]);
        };
        for (std::size_t j = ring_->n; j < m.size(); ++j) put(j);
        for (int i = 0; i < ring_->n; ++i) put(i);
        return s;
    }

private:
    void check(const Poly& o) {
        if (!ring_) {
            ring_ = o.ring_;
            return;
        }
        if (!o.terms_.empty() && !same_ring(ring_, o.ring_)) throw std::invalid_argument("ring mismatch");
    }

    Poly mul_if(const Poly& b, const std::function<bool(const Monomial&)>& keep) const {
        if (!same_ring(ring_, b.ring_) && !is_zero() && !b.is_zero()) throw std::invalid_argument("ring mismatch");
        Poly r(ring_ ? ring_ : b.ring_);
        Monomial t;
        for (auto& [ma, ca] : terms_)
            for (auto& [mb, cb] : b.terms_) {
                t = ma;
                for (std::size_t i = 0; i < t.size(); ++i) t[i] += mb[i];
                if (keep && !keep(t)) continue;
                r.add_term(t, ca * cb);
            }
        return r;
    }

    RingPtr ring_;
    Terms terms_;
};

inline Poly poly_var(const RingPtr& r, const std::string& name) {
    int s = r->slot_of(name);
    if (s < 0) throw std::invalid_argument("unknown variable " + name);
    return Poly::var(r, static_cast<std::size_t>(s));
}

} // namespace ffnf

#endif
