#ifndef FFNF_DSL_HPP
#define FFNF_DSL_HPP

#include "vector_field.hpp"

#include <cctype>
#include <optional>

namespace ffnf {

enum class DiagnosticKind { Syntax, NonPolynomial, UnknownIdentifier, Declaration, Triangularity };

inline const char* diagnostic_name(DiagnosticKind k) {
    switch (k) {
    case DiagnosticKind::Syntax: return "syntax";
    case DiagnosticKind::NonPolynomial: return "non-polynomial";
    case DiagnosticKind::UnknownIdentifier: return "unknown-identifier";
    case DiagnosticKind::Declaration: return "declaration";
    case DiagnosticKind::Triangularity: return "triangularity";
    }
    return "?";
}

struct ParseError : std::runtime_error {
    DiagnosticKind kind;
    int line, col;
    std::string message;
    std::string source;
    ParseError(DiagnosticKind k, int l, int c, const std::string& msg)
        : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + diagnostic_name(k) + ": " + msg),
          kind(k), line(l), col(c), message(msg) {}
};

struct ParamDecl {
    std::string name;
    std::optional<Scalar> value;
    std::optional<int> grade;
    bool operator==(const ParamDecl& o) const { return name == o.name && value == o.value && grade == o.grade; }
};

// Parsed system; equations live over a ring carrying every declared parameter, bound or not.
struct ParsedSystem {
    int n = 0;
    std::vector<ParamDecl> params;
    std::vector<Poly> equations;

    RingPtr system_ring() const { return equations.empty() ? RingPtr() : equations.front().ring(); }

    bool operator==(const ParsedSystem& o) const {
        if (n != o.n || params != o.params || equations.size() != o.equations.size()) return false;
        for (std::size_t i = 0; i < equations.size(); ++i)
            if (equations[i].render() != o.equations[i].render()) return false;
        return true;
    }

    // Bound parameters substituted; the rest stay symbolic with their declared grade (0 if none).
    VectorField field() const {
        std::vector<std::string> names;
        std::vector<int> grades;
        std::map<std::string, Scalar> binding;
        for (auto& p : params) {
            if (p.value) binding[p.name] = *p.value;
            else names.push_back(p.name), grades.push_back(p.grade.value_or(0));
        }
        RingPtr r = make_ring(n, names, grades);
        std::vector<Poly> comps;
        for (auto& e : equations) comps.push_back(e.substitute(binding, r));
        return VectorField(r, comps);
    }
};

namespace detail {

struct Token {
    enum Kind { Ident, Int, Op, Prime, End } kind;
    std::string text;
    int col;
};

class LineParser {
public:
    LineParser(const std::string& s, int line) : s_(s), line_(line) { lex(); }

    const Token& peek() const { return toks_[i_]; }
    Token next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
    bool at_end() const { return peek().kind == Token::End; }
    bool accept(const std::string& op) {
        if (peek().kind == Token::Op && peek().text == op) return ++i_, true;
        return false;
    }
    void expect(const std::string& op) {
        if (!accept(op)) fail(DiagnosticKind::Syntax, peek(), "expected '" + op + "'");
    }
    [[noreturn]] void fail(DiagnosticKind k, const Token& t, const std::string& msg) const {
        throw ParseError(k, line_, t.col, msg + (t.kind == Token::End ? " at end of line" : " near '" + t.text + "'"));
    }
    int line() const { return line_; }

    Scalar rational() {
        bool neg = accept("-");
        Token a = next();
        if (a.kind != Token::Int) fail(DiagnosticKind::Syntax, a, "expected a rational literal");
        Scalar v(a.text);
        if (accept("/")) {
            Token b = next();
            if (b.kind != Token::Int) fail(DiagnosticKind::Syntax, b, "expected a denominator");
            Scalar d(b.text);
            if (d == 0) fail(DiagnosticKind::NonPolynomial, b, "division by zero");
            v /= d;
        }
        return neg ? Scalar(-v) : v;
    }

    // expr := term (('+'|'-') term)*
    Poly expr(const RingPtr& r) {
        Poly acc(r);
        bool neg = false;
        if (accept("-")) neg = true;
        else accept("+");
        acc = term(r);
        if (neg) acc = -acc;
        for (;;) {
            if (accept("+")) acc += term(r);
            else if (accept("-")) acc -= term(r);
            else return acc;
        }
    }

private:
    // term := power (('*'|'/') power)*
    Poly term(const RingPtr& r) {
        Poly acc = power(r);
        for (;;) {
            if (accept("*")) {
                acc = acc * power(r);
            } else if (peek().kind == Token::Op && peek().text == "/") {
                Token slash = next();
                Poly d = power(r);
                bool constant = d.terms().size() == 1 && total_degree(d.terms().begin()->first) == 0;
                if (d.is_zero()) fail(DiagnosticKind::NonPolynomial, slash, "division by zero");
                if (!constant) fail(DiagnosticKind::NonPolynomial, slash, "division by a non-constant expression");
                acc = acc.scaled(1 / d.terms().begin()->second);
            } else if (peek().kind == Token::Ident || peek().kind == Token::Int || (peek().kind == Token::Op && peek().text == "(")) {
                fail(DiagnosticKind::Syntax, peek(), "missing '*' between factors");
            } else {
                return acc;
            }
        }
    }

    // power := atom ('^' int)?
    Poly power(const RingPtr& r) {
        Poly base = atom(r);
        if (peek().kind == Token::Op && peek().text == "^") {
            Token caret = next();
            if (peek().kind == Token::Op && peek().text == "-") fail(DiagnosticKind::NonPolynomial, caret, "negative exponent");
            Token e = next();
            if (e.kind != Token::Int) fail(DiagnosticKind::NonPolynomial, e, "exponent must be a non-negative integer");
            if (e.text.size() > 4 || std::stol(e.text) > 1000) fail(DiagnosticKind::NonPolynomial, e, "exponent too large");
            long k = std::stol(e.text);
            Poly out = Poly::constant(r, 1);
            for (long i = 0; i < k; ++i) out = out * base;
            return out;
        }
        return base;
    }

    Poly atom(const RingPtr& r) {
        Token t = next();
        if (t.kind == Token::Int) return Poly::constant(r, Scalar(t.text));
        if (t.kind == Token::Ident) {
            int s = r->slot_of(t.text);
            if (s < 0) fail(DiagnosticKind::UnknownIdentifier, t, "unknown identifier");
            return Poly::var(r, static_cast<std::size_t>(s));
        }
        if (t.kind == Token::Op && t.text == "(") {
            Poly e = expr(r);
            expect(")");
            return e;
        }
        if (t.kind == Token::Op && t.text == "-") return -power(r);
        fail(DiagnosticKind::Syntax, t, "expected a number, identifier or '('");
    }

    void lex() {
        std::size_t i = 0;
        while (i < s_.size()) {
            char c = s_[i];
            int col = static_cast<int>(i) + 1;
            if (c == '#') break;
            if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
                toks_.push_back({Token::Ident, s_.substr(i, j - i), col});
                i = j;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t j = i;
                while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
                if (j < s_.size() && s_[j] == '.')
                    throw ParseError(DiagnosticKind::Syntax, line_, static_cast<int>(j) + 1, "decimal literals are not supported; write p/q");
                toks_.push_back({Token::Int, s_.substr(i, j - i), col});
                i = j;
            } else if (c == '\'') {
                toks_.push_back({Token::Prime, "'", col});
                ++i;
            } else if (std::string("+-*/^()=").find(c) != std::string::npos) {
                toks_.push_back({Token::Op, std::string(1, c), col});
                ++i;
            } else {
                throw ParseError(DiagnosticKind::Syntax, line_, col, std::string("unexpected character '") + c + "'");
            }
        }
        toks_.push_back({Token::End, "", static_cast<int>(s_.size()) + 1});
    }

    std::string s_;
    int line_;
    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

inline int state_index(const std::string& id) {
    if (id.size() < 2 || id[0] != 'x' || id[1] == '0') return 0;
    for (std::size_t k = 1; k < id.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(id[k]))) return 0;
    return id.size() > 6 ? 0 : std::stoi(id.substr(1));
}

} // namespace detail

inline ParsedSystem parse_system(const std::string& text) {
    ParsedSystem sys;
    struct Eq {
        int comp, line;
        std::string src;
        std::size_t rhs_at;
    };
    std::vector<Eq> eqs;
    std::vector<std::string> lines;
    {
        std::string cur;
        for (char c : text) {
            if (c == '\n') lines.push_back(cur), cur.clear();
            else if (c != '\r') cur += c;
        }
        lines.push_back(cur);
    }
    int dim_line = 0;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        int ln = static_cast<int>(li) + 1;
        detail::LineParser lp(lines[li], ln);
        if (lp.at_end()) continue;
        detail::Token head = lp.next();
        if (head.kind != detail::Token::Ident) lp.fail(DiagnosticKind::Syntax, head, "expected a statement");
        if (head.text == "dim") {
            if (dim_line) lp.fail(DiagnosticKind::Declaration, head, "dimension declared twice");
            detail::Token v = lp.next();
            if (v.kind != detail::Token::Int || v.text.size() > 3 || std::stoi(v.text) < 1)
                lp.fail(DiagnosticKind::Declaration, v, "dimension must be a positive integer");
            sys.n = std::stoi(v.text);
            dim_line = ln;
            if (!lp.at_end()) lp.fail(DiagnosticKind::Syntax, lp.peek(), "trailing input");
        } else if (head.text == "param") {
            if (!eqs.empty()) lp.fail(DiagnosticKind::Declaration, head, "parameters must be declared before equations");
            detail::Token nm = lp.next();
            if (nm.kind != detail::Token::Ident || nm.text == "dim" || nm.text == "param" || nm.text == "grade" ||
                detail::state_index(nm.text))
                lp.fail(DiagnosticKind::Declaration, nm, "invalid parameter name");
            for (auto& p : sys.params)
                if (p.name == nm.text) lp.fail(DiagnosticKind::Declaration, nm, "parameter declared twice");
            ParamDecl d{nm.text, std::nullopt, std::nullopt};
            if (lp.accept("=")) d.value = lp.rational();
            if (!lp.at_end()) {
                detail::Token g = lp.next();
                if (g.kind != detail::Token::Ident || g.text != "grade") lp.fail(DiagnosticKind::Syntax, g, "expected 'grade'");
                detail::Token gv = lp.next();
                if (gv.kind != detail::Token::Int || gv.text.size() > 3) lp.fail(DiagnosticKind::Declaration, gv, "grade must be a non-negative integer");
                d.grade = std::stoi(gv.text);
            }
            if (!lp.at_end()) lp.fail(DiagnosticKind::Syntax, lp.peek(), "trailing input");
            sys.params.push_back(d);
        } else if (int k = detail::state_index(head.text)) {
            if (!dim_line) lp.fail(DiagnosticKind::Declaration, head, "'dim' must come before equations");
            if (k > sys.n) lp.fail(DiagnosticKind::UnknownIdentifier, head, "component outside dimension " + std::to_string(sys.n));
            if (lp.next().kind != detail::Token::Prime) lp.fail(DiagnosticKind::Syntax, head, "expected x<k>' on the left-hand side");
            for (auto& e : eqs)
                if (e.comp == k) lp.fail(DiagnosticKind::Declaration, head, "second equation for " + head.text);
            lp.expect("=");
            eqs.push_back({k, ln, lines[li], 0});
        } else {
            lp.fail(DiagnosticKind::Syntax, head, "expected 'dim', 'param' or x<k>'");
        }
    }
    if (!dim_line) throw ParseError(DiagnosticKind::Declaration, 1, 1, "missing 'dim' statement");
    std::vector<std::string> names;
    std::vector<int> grades;
    for (auto& p : sys.params) names.push_back(p.name), grades.push_back(p.grade.value_or(0));
    RingPtr r = make_ring(sys.n, names, grades);
    sys.equations.assign(sys.n, Poly(r));
    std::vector<int> eq_line(sys.n + 1, 0);
    for (auto& e : eqs) {
        detail::LineParser lp(e.src, e.line);
        lp.next(), lp.next(), lp.next();  // x<k> ' =
        Poly f = lp.expr(r);
        if (!lp.at_end()) lp.fail(DiagnosticKind::Syntax, lp.peek(), "unexpected token");
        sys.equations[e.comp - 1] = f;
        eq_line[e.comp] = e.line;
    }
    for (int p = 1; p <= sys.n; ++p)
        if (!eq_line[p]) throw ParseError(DiagnosticKind::Declaration, dim_line, 1, "missing equation for x" + std::to_string(p) + "'");
    // triangularity: x_p' may use only x_p..x_n
    for (auto& e : eqs) {
        int lowest = e.comp;
        for (auto& [m, c] : sys.equations[e.comp - 1].terms())
            for (int q = 0; q < e.comp - 1; ++q)
                if (m[q]) lowest = std::min(lowest, q + 1);
        if (lowest == e.comp) continue;
        std::string var = "x" + std::to_string(lowest);
        int col = 1;
        std::size_t pos = e.src.find('=');
        while ((pos = e.src.find(var, pos)) != std::string::npos) {
            std::size_t end = pos + var.size();
            if (end >= e.src.size() || !std::isdigit(static_cast<unsigned char>(e.src[end]))) {
                col = static_cast<int>(pos) + 1;
                break;
            }
            pos = end;
        }
        throw ParseError(DiagnosticKind::Triangularity, e.line, col,
                         "component " + std::to_string(e.comp) + " depends on " + var);
    }
    return sys;
}

inline std::string render_system(const ParsedSystem& s) {
    std::string out = "dim " + std::to_string(s.n) + "\n";
    for (auto& p : s.params) {
        out += "param " + p.name;
        if (p.value) out += " = " + to_string(*p.value);
        if (p.grade) out += " grade " + std::to_string(*p.grade);
        out += "\n";
    }
    for (int k = 1; k <= s.n; ++k) out += "x" + std::to_string(k) + "' = " + s.equations[k - 1].render() + "\n";
    return out;
}

// Canonical text of a field, one line per component.
inline std::string render_field(const VectorField& V) {
    std::string out;
    for (int k = 1; k <= V.n(); ++k) out += "x" + std::to_string(k) + "' = " + V.comp(k).render() + "\n";
    return out;
}

// DSL text for an arbitrary field; symbolic parameters keep their grades.
inline std::string field_to_dsl(const VectorField& V) {
    const RingPtr& r = V.ring();
    std::string out = "dim " + std::to_string(V.n()) + "\n";
    for (std::size_t j = 0; j < r->param_names.size(); ++j)
        out += "param " + r->param_names[j] + " grade " + std::to_string(r->param_grades[j]) + "\n";
    return out + render_field(V);
}

} // namespace ffnf

#endif
