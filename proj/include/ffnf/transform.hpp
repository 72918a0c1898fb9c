#ifndef FFNF_TRANSFORM_HPP
#define FFNF_TRANSFORM_HPP

#include "vector_field.hpp"

#include <variant>

namespace ffnf {

// (r, X) in the semidirect product of the ring r^p with triangular fields.
struct OuterGenerator {
    int block = 1;
    Poly ring_part;
    VectorField field_part;

    bool is_zero() const { return ring_part.is_zero() && field_part.is_zero(); }
    OuterGenerator scaled(const Scalar& s) const { return {block, ring_part.scaled(s), field_part.scaled(s)}; }
};

inline int block_start(const VectorField& Y, int block) {
    auto b = Y.bounds();
    if (block < 1 || block > static_cast<int>(b.size())) throw std::out_of_range("block index out of range");
    return b[block - 1];
}

// r times the block-p components of Y; components outside the block are not part of the action
inline VectorField star(const Poly& r, const VectorField& Y, int block, const Truncation* t = nullptr) {
    if (block >= static_cast<int>(Y.bounds().size())) throw std::out_of_range("block index out of range");
    int lo = block_start(Y, block), hi = block_start(Y, block + 1);
    if (!r.is_zero() && r.min_state_var() < lo - 1)
        throw std::invalid_argument("ring element uses x" + std::to_string(r.min_state_var() + 1) + " below block " +
                                    std::to_string(block));
    VectorField out(Y.ring());
    out.set_blocks(Y.blocks());
    for (int p = lo; p < hi; ++p)
        out.comp(p) = t ? r.mul_capped(Y.comp(p), t->g.w, t->cap_for(p - 1)) : r * Y.comp(p);
    return out;
}

inline VectorField rho(const OuterGenerator& g, const VectorField& V, const Truncation* t = nullptr) {
    VectorField out = lie_bracket(g.field_part, V, t);
    if (!g.ring_part.is_zero()) out += star(g.ring_part, V, g.block, t);
    return out;
}

inline OuterGenerator semidirect_bracket(const OuterGenerator& a, const OuterGenerator& b) {
    if (a.block != b.block) throw std::invalid_argument("semidirect bracket: block mismatch");
    Poly r = a.field_part.apply(b.ring_part) - b.field_part.apply(a.ring_part);
    return {a.block, r, lie_bracket(a.field_part, b.field_part)};
}

inline constexpr int kMaxExpTerms = 4096;

// exp(ad_Y) V = V + [Y,V] + [Y,[Y,V]]/2 + ... truncated
inline VectorField exp_ad(const VectorField& Y, const VectorField& V, const Truncation& t) {
    VectorField res = V.truncated(t), term = res;
    for (int k = 1; k <= kMaxExpTerms; ++k) {
        term = lie_bracket(Y, term, &t).truncated(t).scaled(Scalar(1, k));
        if (term.is_zero()) return res;
        res += term;
    }
    throw math_error("exp(ad) series did not terminate under the truncation");
}

inline VectorField exp_rho(const OuterGenerator& g, const VectorField& V, const Truncation& t) {
    VectorField res = V.truncated(t), term = res;
    for (int k = 1; k <= kMaxExpTerms; ++k) {
        term = rho(g, term, &t).truncated(t).scaled(Scalar(1, k));
        if (term.is_zero()) return res;
        res += term;
    }
    throw math_error("exp(rho) series did not terminate under the truncation");
}

enum class StepKind { Constant, Linear, Inner, Outer };

inline const char* kind_name(StepKind k) {
    switch (k) {
    case StepKind::Constant: return "constant";
    case StepKind::Linear: return "linear";
    case StepKind::Inner: return "inner";
    case StepKind::Outer: return "outer";
    }
    return "?";
}

struct NormalizationStep {
    StepKind kind = StepKind::Inner;
    long grade = 0;
    int component = 0;
    std::variant<VectorField, OuterGenerator> generator;
    VectorField before, after;
    Truncation truncation;  // before = previous field truncated here
    std::string label;
};

struct Verdict {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct NormalFormTrace {
    VectorField input;
    std::vector<NormalizationStep> steps;
    VectorField output;
    Truncation truncation;
    long truncation_degree = 0;
    std::string residual_basis = "echelon";
    std::vector<Verdict> verdicts;
    std::vector<std::string> notes;

    bool all_ok() const {
        for (auto& v : verdicts)
            if (!v.ok) return false;
        return true;
    }
};

inline VectorField apply_step(const NormalizationStep& s, const VectorField& V) {
    if (auto* Y = std::get_if<VectorField>(&s.generator)) return exp_ad(*Y, V, s.truncation);
    return exp_rho(std::get<OuterGenerator>(s.generator), V, s.truncation);
}

// Appends a step under the trace's current truncation and returns the new field.
inline VectorField record(NormalFormTrace& tr, StepKind kind, long grade, int comp,
                          std::variant<VectorField, OuterGenerator> gen, const VectorField& V, std::string label = {}) {
    NormalizationStep s;
    s.kind = kind;
    s.grade = grade;
    s.component = comp;
    s.generator = std::move(gen);
    s.truncation = tr.truncation;
    s.before = V.truncated(tr.truncation);
    s.after = apply_step(s, s.before);
    s.label = std::move(label);
    VectorField out = s.after;
    tr.steps.push_back(std::move(s));
    return out;
}

struct ReplayResult {
    bool ok = true;
    std::size_t first_mismatch = 0;
    VectorField result;
};

// Re-applies every step to the input; checks each recorded snapshot and the final output.
inline ReplayResult replay(const NormalFormTrace& tr) {
    ReplayResult r;
    VectorField V = tr.input;
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        const auto& s = tr.steps[i];
        V = V.truncated(s.truncation);
        if (V != s.before) {
            r.ok = false;
            r.first_mismatch = i;
            r.result = V;
            return r;
        }
        V = apply_step(s, V);
        if (V != s.after) {
            r.ok = false;
            r.first_mismatch = i;
            r.result = V;
            return r;
        }
    }
    V = V.truncated(tr.truncation);
    r.result = V;
    r.ok = V == tr.output;
    r.first_mismatch = tr.steps.size();
    return r;
}

} // namespace ffnf

#endif
