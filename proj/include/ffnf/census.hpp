#ifndef FFNF_CENSUS_HPP
#define FFNF_CENSUS_HPP

#include "sl2.hpp"

namespace ffnf {

// u-exponent -> multiplicity
using UPoly = std::map<long, long>;

inline std::string render_upoly(const UPoly& u) {
    std::string s;
    for (auto& [e, c] : u) {
        if (c == 0) continue;
        if (!s.empty()) s += " + ";
        std::string mono = e == 0 ? "" : e == 1 ? "u" : "u^" + std::to_string(e);
        if (mono.empty()) s += std::to_string(c);
        else s += (c == 1 ? "" : std::to_string(c) + "*") + mono;
    }
    return s.empty() ? "0" : s;
}

// Truncated series in d with u-polynomial coefficients; the constant factor t^2 is implicit.
struct CensusSeries {
    int t_marker = 2;
    long max_d = 0;
    std::map<std::pair<long, long>, long> coefficients;  // (d, u) -> count

    UPoly coefficient(long d) const {
        UPoly u;
        for (auto& [k, c] : coefficients)
            if (k.first == d && c) u[k.second] = c;
        return u;
    }
};

// Product of the geometric series 1/(1-u^2 d) and 1/(1-d^2), truncated at d^max_d.
inline CensusSeries expand_master_gf(long max_d) {
    if (max_d < 0) throw std::invalid_argument("max_d must be non-negative");
    std::map<std::pair<long, long>, long> a, b, prod;
    for (long k = 0; k <= max_d; ++k) a[{k, 2 * k}] = 1;
    for (long l = 0; 2 * l <= max_d; ++l) b[{2 * l, 0}] = 1;
    for (auto& [ka, ca] : a)
        for (auto& [kb, cb] : b) {
            long d = ka.first + kb.first;
            if (d > max_d) continue;
            prod[{d, ka.second + kb.second}] += ca * cb;
        }
    CensusSeries s;
    s.max_d = max_d;
    s.coefficients = std::move(prod);
    return s;
}

// H_p weights of the quadratic kernel, read off an independently computed kernel basis.
inline UPoly census(int n, int p) {
    if (p < 1 || p > n) throw std::out_of_range("component index out of range");
    UPoly u;
    for (auto& f : kernel_basis(n, p, 2)) ++u[poly_weight(f, n, p)];
    return u;
}

inline bool census_matches_master(int n, int p) {
    return census(n, p) == expand_master_gf(n - p).coefficient(n - p);
}

// sum over kernel elements of (weight + 1) equals the number of quadratics in m+1 variables
inline bool weight_sum_check(long max_m, std::vector<std::string>* failures = nullptr) {
    auto gf = expand_master_gf(max_m);
    bool ok = true;
    for (long m = 0; m <= max_m; ++m) {
        long from_gf = 0, from_kernel = 0;
        for (auto& [e, c] : gf.coefficient(m)) from_gf += c * (e + 1);
        for (auto& [e, c] : census(static_cast<int>(m) + 1, 1)) from_kernel += c * (e + 1);
        long want = (m + 2) * (m + 1) / 2;
        if (from_gf != want || from_kernel != want) {
            ok = false;
            if (failures)
                failures->push_back("m=" + std::to_string(m) + ": series " + std::to_string(from_gf) + ", kernel " +
                                    std::to_string(from_kernel) + ", expected " + std::to_string(want));
        }
    }
    return ok;
}

// Extra factor u^(2 alpha) in front of sum_l u^(4l), l <= (n-p)/2; alpha = (n-p) mod 2.
inline int census_alpha(int n, int p) { return (n - p) % 2; }
// Alternative phrasing: alpha = 0 for odd p, 1 for even p.
inline int census_alpha_parity_of_p(int p) { return p % 2 == 0 ? 1 : 0; }

inline UPoly census_closed_form(int n, int p, int alpha) {
    UPoly u;
    for (int l = 0; 2 * l <= n - p; ++l) ++u[2 * alpha + 4 * l];
    return u;
}

struct AlphaDisagreement {
    int n, p, alpha, alpha_parity_of_p;
};

// Pairs where the parity-of-p rule gives a different exponent than the lowest census weight.
inline std::vector<AlphaDisagreement> alpha_rule_report(int max_n) {
    std::vector<AlphaDisagreement> out;
    for (int n = 1; n <= max_n; ++n)
        for (int p = 1; p <= n; ++p) {
            auto c = census(n, p);
            if (c != census_closed_form(n, p, census_alpha(n, p))) throw std::logic_error("census exponent rule broken");
            int alt = census_alpha_parity_of_p(p);
            if (c != census_closed_form(n, p, alt)) out.push_back({n, p, census_alpha(n, p), alt});
        }
    return out;
}

} // namespace ffnf

#endif
