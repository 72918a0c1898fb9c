#ifndef FFNF_SCALAR_HPP
#define FFNF_SCALAR_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace ffnf {

using Scalar = mpq_class;

struct math_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// raised when a rational binding makes a required denominator vanish
struct singular_binding : math_error {
    using math_error::math_error;
};

inline Scalar canon(Scalar q) {
    q.canonicalize();
    return q;
}

inline std::string to_string(const Scalar& q) {
    Scalar c = canon(q);
    return c.get_str();
}

// accepts "p", "-p", "p/q"
inline Scalar parse_scalar(const std::string& s) {
    Scalar q;
    if (q.set_str(s, 10) != 0)
        throw std::invalid_argument("bad rational literal: " + s);
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
}

// C(a, b) with the convention C(a, b) = 0 outside 0 <= b <= a
inline Scalar binom(long a, long b) {
    if (a < 0 || b < 0 || b > a) return Scalar(0);
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
    return Scalar(r);
}

inline Scalar pow(const Scalar& q, unsigned e) {
    Scalar r(1);
    for (unsigned i = 0; i < e; ++i) r *= q;
    return r;
}

inline Scalar checked_div(const Scalar& a, const Scalar& b, const char* what) {
    if (b == 0) throw singular_binding(std::string("singular binding: ") + what + " vanishes");
    Scalar r = a / b;
    r.canonicalize();
    return r;
}

} // namespace ffnf

#endif
