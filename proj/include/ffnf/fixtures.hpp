#ifndef FFNF_FIXTURES_HPP
#define FFNF_FIXTURES_HPP

#include "sl2.hpp"

namespace ffnf {

// Reference quadratic invariants for 2D-7D; flagged entries disagree with the closed form.
struct TauFixture {
    int n, p, k;
    const char* listed;
    bool flagged;  // known not to agree with the closed form
};

inline const std::vector<TauFixture>& tau_fixtures() {
    static const std::vector<TauFixture> t = {
        {2, 1, 0, "x1^2", false},
        {3, 1, 0, "x1^2", false},
        {3, 1, 2, "2*x1*x3 - x2^2", false},
        {4, 1, 0, "x1^2", false},
        {4, 1, 2, "6*x1*x3 - 4*x2^2", false},
        {4, 2, 2, "2*x2*x4 - x3^2", false},
        {5, 1, 0, "x1^2", false},
        {5, 1, 2, "12*x1*x3 - 9*x2^2", false},
        {5, 1, 4, "2*x1*x5 - 2*x2*x4 + x3^2", false},
        {5, 2, 2, "6*x2*x4 - 4*x3^2", false},
        {5, 3, 2, "2*x3*x5 - x4^2", false},
        {6, 1, 0, "x1^2", false},
        {6, 1, 2, "20*x1*x3 - 16*x2^2", false},
        {6, 1, 4, "10*x1*x5 - 16*x2*x4 + 9*x3^2", false},
        {6, 2, 2, "12*x2*x4 - 9*x3^2", false},
        {6, 2, 4, "2*x2*x6 - 2*x3*x5 + x4^2", false},
        {6, 3, 2, "6*x3*x5 - 4*x4^2", false},
        {6, 4, 2, "2*x4*x6 - x5^2", false},
        {7, 1, 0, "x1^2", false},
        {7, 1, 2, "20*x1*x3 - 16*x2^2", true},
        {7, 1, 4, "30*x1*x5 - 60*x2*x4 + 36*x3^2", false},
        {7, 1, 6, "2*x1*x7 - 2*x2*x6 + 2*x3*x5 - x4^2", false},
        {7, 2, 2, "x2*x4 - x3^2", true},
        {7, 2, 4, "x2*x6 - 4*x3*x5 + 3*x4^2", true},
        {7, 3, 2, "x3*x5 - x4^2", true},
        {7, 3, 4, "x3*x7 - 4*x4*x6 + 3*x5^2", true},
        {7, 4, 2, "x4*x6 - x5^2", true},
        {7, 5, 2, "x5*x7 - x6^2", true},
    };
    return t;
}

struct TauFixtureCheck {
    TauFixture fixture;
    std::string computed;
    bool match;         // byte-exact
    bool proportional;  // listed is a nonzero multiple of the closed form
    bool in_kernel;     // listed lies in ker L_M
    bool as_expected() const { return match != fixture.flagged; }
};

inline TauFixtureCheck check_tau_fixture(const TauFixture& f) {
    RingPtr r = make_ring(f.n);
    Poly closed = tau_closed_form(r, f.p, f.k).poly;
    TauFixtureCheck c{f, closed.render(), false, false, false};
    c.match = c.computed == f.listed;
    // parse the listed form: terms "c*xa*xb" or "xa^2"
    Poly listed(r);
    std::string s = f.listed;
    std::size_t i = 0;
    Scalar sign = 1;
    while (i < s.size()) {
        if (s[i] == ' ') { ++i; continue; }
        if (s[i] == '-' || s[i] == '+') { sign = s[i] == '-' ? -1 : 1; ++i; continue; }
        std::size_t j = s.find(' ', i);
        std::string term = s.substr(i, j == std::string::npos ? std::string::npos : j - i);
        i = j == std::string::npos ? s.size() : j;
        Poly t = Poly::constant(r, sign);
        std::size_t a = 0;
        while (a <= term.size()) {
            std::size_t b = term.find('*', a);
            std::string fac = term.substr(a, b == std::string::npos ? std::string::npos : b - a);
            if (fac[0] == 'x') {
                std::size_t caret = fac.find('^');
                int v = std::stoi(fac.substr(1, caret == std::string::npos ? std::string::npos : caret - 1));
                int e = caret == std::string::npos ? 1 : std::stoi(fac.substr(caret + 1));
                for (int q = 0; q < e; ++q) t = t * Poly::var(r, v - 1);
            } else {
                t = t.scaled(Scalar(fac));
            }
            if (b == std::string::npos) break;
            a = b + 1;
        }
        listed += t;
        sign = 1;
    }
    auto& [m0, c0] = *listed.terms().begin();
    Scalar k = closed.coeff(m0);
    c.proportional = k != 0 && closed.scaled(c0 / k) == listed;
    c.in_kernel = build_sl2(r, f.p).M.apply(listed).is_zero();
    return c;
}

} // namespace ffnf

#endif
