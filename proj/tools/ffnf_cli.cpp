#include "ffnf/census.hpp"
#include "ffnf/dsl.hpp"
#include "ffnf/fixtures.hpp"
#include "ffnf/outer_nf.hpp"
#include "ffnf/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace ffnf;

namespace {

enum Exit { kOk = 0, kVerdictFailed = 1, kUsage = 2, kParse = 3, kSingular = 4, kInvalid = 5, kInternal = 6 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ParsedSystem load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_system(ss.str());
    } catch (ParseError& e) {
        e.source = path;
        throw;
    }
}

std::string basis_name(bool tau) { return tau ? "tau" : "echelon"; }

void add_trace_text(Report& r, const NormalFormTrace& tr) {
    r.text.push_back("steps:");
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        auto& s = tr.steps[i];
        std::string gen;
        if (auto* Y = std::get_if<VectorField>(&s.generator)) {
            for (int p = 1; p <= Y->n(); ++p)
                if (!Y->comp(p).is_zero()) gen += (gen.empty() ? "" : ", ") + ("Y" + std::to_string(p) + " = " + Y->comp(p).render());
        } else {
            auto& o = std::get<OuterGenerator>(s.generator);
            gen = "block " + std::to_string(o.block) + ", ring " + o.ring_part.render();
            for (int p = 1; p <= o.field_part.n(); ++p)
                if (!o.field_part.comp(p).is_zero()) gen += ", Y" + std::to_string(p) + " = " + o.field_part.comp(p).render();
        }
        r.text.push_back("  [" + std::to_string(i + 1) + "] " + kind_name(s.kind) + " grade " + std::to_string(s.grade) +
                         " component " + std::to_string(s.component) + " (" + s.label + "): " + gen);
    }
}

void add_replay(Report& r, const NormalFormTrace& tr) {
    auto rp = replay(tr);
    r.verdicts.push_back({"replay", rp.ok, rp.ok ? "" : "mismatch at step " + std::to_string(rp.first_mismatch + 1)});
}

// degree-2 output slices in tau coordinates, coefficients polynomial in the symbolic parameters
json tau_residuals(const VectorField& V, std::vector<std::string>& lines) {
    const RingPtr& r = V.ring();
    int n = r->n;
    json out = json::array();
    for (int p = 1; p <= n; ++p) {
        Poly q = V.comp(p).filter([&](const Monomial& m) { return state_degree(m, n) == 2; });
        std::vector<Poly> coef((n - p) / 2 + 1, Poly(r));
        for (auto& [k, f] : detail::by_param(q)) {
            auto c = tau_coordinates(f, p);
            for (std::size_t l = 0; l < c.size(); ++l) coef[l] += Poly::term(r, k, c[l]);
        }
        std::string line = "x" + std::to_string(p) + "':";
        json row = {{"component", p}, {"coordinates", json::array()}};
        for (std::size_t l = 0; l < coef.size(); ++l) {
            line += " tau^" + std::to_string(2 * l) + " -> " + coef[l].render() + (l + 1 < coef.size() ? "," : "");
            row["coordinates"].push_back({{"k", 2 * l}, {"invariant", tau_closed_form(r, p, static_cast<int>(2 * l)).poly.render()},
                                          {"coefficient", coef[l].render()}});
        }
        lines.push_back(line);
        out.push_back(row);
    }
    return out;
}

Report cmd_sl2(int n, int p) {
    Report r;
    auto t = build_sl2(n, p);
    for (auto [name, X] : {std::pair{"N", &t.N}, {"H", &t.H}, {"M", &t.M}}) {
        std::string line = std::string(name) + ":";
        for (int q = 1; q <= n; ++q)
            if (!X->comp(q).is_zero()) line += " " + X->comp(q).render() + "*d" + std::to_string(q);
        r.text.push_back(line);
    }
    auto rel = check_sl2_relations(t);
    r.results = {{"n", n}, {"p", p}, {"N", render_field(t.N)}, {"H", render_field(t.H)}, {"M", render_field(t.M)}};
    r.verdicts = {{"[M,N]=H", rel.mn, ""}, {"[H,N]=-2N", rel.hn, ""}, {"[H,M]=2M", rel.hm, ""}};
    return r;
}

Report cmd_kernel(int n, int p, int d) {
    Report r;
    auto ker = kernel_basis(n, p, d);
    json rows = json::array();
    for (auto& f : ker) {
        long w = poly_weight(f, n, p);
        r.text.push_back("weight " + std::to_string(w) + ": " + f.render());
        rows.push_back({{"poly", f.render()}, {"weight", w}});
    }
    r.results = {{"n", n}, {"p", p}, {"degree", d}, {"basis", "echelon"}, {"kernel", rows},
                 {"generator_monomials", json::array()}};
    auto rg = make_ring(n);
    for (auto& m : generator_basis(rg, p, d)) r.results["generator_monomials"].push_back(Poly::term(rg, m, 1).render());
    r.verdicts.push_back({"dimension", ker.size() + generator_basis(rg, p, d).size() == monomial_basis(rg, p, d).size(), ""});
    return r;
}

Report cmd_tau(int n, int p, int k) {
    Report r;
    auto t = tau_closed_form(n, p, k);
    auto rg = make_ring(n);
    auto sl = build_sl2(rg, p);
    Poly oracle = transvectant(Poly::var(rg, p - 1), Poly::var(rg, p - 1), k, sl);
    r.text.push_back(t.poly.render());
    r.results = {{"n", n}, {"p", p}, {"k", k}, {"tau", t.poly.render()}, {"weight", t.weight}};
    r.verdicts.push_back({"transvectant", oracle == t.poly, oracle == t.poly ? "" : "transvectant gives " + oracle.render()});
    return r;
}

Report cmd_census(int n, bool all_p) {
    Report r;
    std::vector<std::pair<int, UPoly>> rows;
    bool ok = true;
    for (int p = 1; p <= (all_p ? n : 1); ++p) {
        auto u = census(n, p);
        rows.emplace_back(p, u);
        bool m = census_matches_master(n, p);
        ok = ok && m;
        r.text.push_back("p=" + std::to_string(p) + ": " + render_upoly(u) + (m ? "" : "   (series disagrees)"));
    }
    r.results = census_to_json(n, rows);
    r.verdicts.push_back({"generating_function", ok, ""});
    return r;
}

Report cmd_cs(long max_m) {
    Report r;
    std::vector<std::string> fails;
    bool ok = weight_sum_check(max_m, &fails);
    r.results = {{"max", max_m}, {"failures", fails}};
    r.text.push_back("sum of (weight + 1) checked for m = 0.." + std::to_string(max_m));
    for (auto& f : fails) r.text.push_back(f);
    r.verdicts.push_back({"weight_sum", ok, ""});
    return r;
}

Report cmd_bracket(const std::string& left, const std::string& right) {
    Report r;
    VectorField X = load(left).field(), Y = load(right).field();
    if (!same_ring(X.ring(), Y.ring())) throw InputError("both systems must declare the same dimension and symbolic parameters");
    VectorField B = lie_bracket(X, Y);
    r.text.push_back(render_field(B));
    r.text.back().pop_back();
    r.results = {{"bracket", field_to_dsl(B)}};
    return r;
}

Report cmd_nf(const std::string& input, long K, bool trace, bool tau) {
    Report r;
    VectorField X = load(input).field();
    auto tr = inner_normalize(X, K, InnerOptions{tau, true});
    r.text.push_back(render_field(tr.output));
    r.text.back().pop_back();
    r.results = {{"degree", K}, {"residual_basis", basis_name(tau)}, {"output", field_to_dsl(tr.output)}};
    if (tau) {
        r.text.push_back("quadratic residuals (tau basis):");
        r.results["residuals"] = tau_residuals(tr.output, r.text);
    }
    if (trace) {
        add_trace_text(r, tr);
        r.trace = trace_to_json(tr);
    }
    r.verdicts = tr.verdicts;
    add_replay(r, tr);
    return r;
}

Report cmd_outer(const std::string& input, const std::string& mode, long K, const std::string& mu, bool trace) {
    Report r;
    VectorField X = load(input).field();
    NormalFormTrace tr;
    r.results = {{"mode", mode}, {"degree", K}};
    if (mode == "quadratic") {
        tr = outer_quadratic_normalize(X, K);
    } else if (mode == "2d") {
        auto res = outer_2d_normalize(X, K, mu);
        tr = res.trace;
        r.results["a2"] = to_string(res.a2);
        r.results["b2"] = to_string(res.b2);
        json grades = json::array();
        bool formula = true;
        for (auto& g : res.grades) {
            Scalar f = survivor_closed_form(g.c, res.a2);
            bool ok = g.mu_coefficient != 1 || f == g.survivor;
            formula = formula && ok;
            json c = json::array();
            for (auto& x : g.c) c.push_back(to_string(x));
            grades.push_back({{"grade", g.grade}, {"c", c}, {"survivor", to_string(g.survivor)}, {"closed_form", to_string(f)}});
            r.text.push_back("grade " + std::to_string(g.grade) + ": survivor " + to_string(g.survivor) + " (closed form " + to_string(f) + ")");
        }
        r.results["grades"] = grades;
        r.verdicts.push_back({"survivor_formula", formula, ""});
    } else if (mode == "3d") {
        auto res = outer_3d_normalize(X, K);
        tr = res.trace;
        r.results["a2"] = to_string(res.a2);
        r.results["b2"] = to_string(res.b2);
        r.results["c2"] = to_string(res.c2);
    } else {
        throw InputError("unknown mode " + mode + " (expected quadratic, 2d or 3d)");
    }
    std::string out = render_field(tr.output);
    out.pop_back();
    r.text.insert(r.text.begin(), out);
    r.results["output"] = field_to_dsl(tr.output);
    if (trace) {
        add_trace_text(r, tr);
        r.trace = trace_to_json(tr);
    }
    for (auto& v : tr.verdicts) r.verdicts.push_back(v);
    add_replay(r, tr);
    return r;
}

Report cmd_verify(const std::string& suite) {
    Report r;
    bool all = suite == "all";
    bool known = false;
    if (all || suite == "sl2") {
        known = true;
        bool ok = true;
        for (int n = 1; n <= 10; ++n)
            for (int p = 1; p <= n; ++p) ok = ok && check_sl2_relations(build_sl2(n, p)).all();
        r.verdicts.push_back({"sl2_relations", ok, "n <= 10"});
    }
    if (all || suite == "tau") {
        known = true;
        bool ok = true;
        for (auto& f : tau_fixtures()) {
            auto c = check_tau_fixture(f);
            ok = ok && c.as_expected();
            r.text.push_back(std::to_string(f.n) + "D p=" + std::to_string(f.p) + " k=" + std::to_string(f.k) + ": " +
                             (c.match ? "match" : "divergent, closed form " + c.computed));
        }
        r.verdicts.push_back({"tau_fixtures", ok, ""});
        bool oracle = true;
        for (int n = 1; n <= 8; ++n) {
            auto rg = make_ring(n);
            for (int p = 1; p <= n; ++p) {
                auto t = build_sl2(rg, p);
                for (int k = 0; k <= n - p; ++k)
                    oracle = oracle && transvectant(Poly::var(rg, p - 1), Poly::var(rg, p - 1), k, t) == tau_closed_form(rg, p, k).poly;
            }
        }
        r.verdicts.push_back({"transvectant_oracle", oracle, "n <= 8"});
    }
    if (all || suite == "census") {
        known = true;
        bool ok = true;
        for (int n = 1; n <= 10; ++n)
            for (int p = 1; p <= n; ++p) ok = ok && census_matches_master(n, p);
        r.verdicts.push_back({"census", ok, "n <= 10"});
        r.verdicts.push_back({"weight_sum", weight_sum_check(9), "n - p <= 9"});
    }
    if (!known) throw InputError("unknown suite " + suite + " (expected sl2, tau, census or all)");
    r.results = {{"suite", suite}};
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Feed-forward normal form toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

    int n = 0, p = 1, d = 2, k = 0;
    long K = 3, max_m = 6;
    bool all_p = false, trace = false, tau = false;
    std::string input, mode, suite, left, right, mu = "mu1";

    auto* sl2 = app.add_subcommand("sl2", "sl2 triple of a component");
    sl2->add_option("--n", n)->required()->check(CLI::Range(1, 40));
    sl2->add_option("--p", p)->required();
    auto* ker = app.add_subcommand("kernel", "kernel of L_M on degree-d polynomials");
    ker->add_option("--n", n)->required()->check(CLI::Range(1, 20));
    ker->add_option("--p", p)->required();
    ker->add_option("--degree", d)->required()->check(CLI::Range(0, 12));
    auto* tauc = app.add_subcommand("tau", "closed-form quadratic invariant");
    tauc->add_option("--n", n)->required()->check(CLI::Range(1, 40));
    tauc->add_option("--p", p)->required();
    tauc->add_option("--k", k)->required();
    auto* cen = app.add_subcommand("census", "quadratic kernel weights");
    cen->add_option("--n", n)->required()->check(CLI::Range(1, 30));
    cen->add_flag("--all-p", all_p);
    auto* cs = app.add_subcommand("cs-test", "dimension count of the quadratic kernel");
    cs->add_option("--max", max_m)->required()->check(CLI::Range(0, 25));
    auto* br = app.add_subcommand("bracket", "Lie bracket of two systems");
    br->add_option("--left", left)->required();
    br->add_option("--right", right)->required();
    auto* nf = app.add_subcommand("nf", "inner normal form");
    nf->add_option("--input", input)->required();
    nf->add_option("--degree", K)->required()->check(CLI::Range(1, 30));
    nf->add_flag("--trace", trace);
    nf->add_flag("--tau-basis", tau);
    auto* outer = app.add_subcommand("outer", "outer normal form");
    outer->add_option("--input", input)->required();
    outer->add_option("--mode", mode)->required()->check(CLI::IsMember({"quadratic", "2d", "3d"}));
    outer->add_option("--degree", K)->required()->check(CLI::Range(2, 30));
    outer->add_option("--mu", mu, "versal parameter for 2d mode");
    outer->add_flag("--trace", trace);
    auto* ver = app.add_subcommand("verify", "built-in consistency suites");
    ver->add_option("--suite", suite)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ffnf: error[usage]: " << e.what() << "\n";
        return kUsage;
    }

    Report r;
    for (int i = 0; i < argc; ++i) r.command.push_back(argv[i]);
    auto diag = [](const char* cls, const std::string& msg) { std::cerr << "ffnf: error[" << cls << "]: " << msg << "\n"; };
    try {
        Report body;
        if (*sl2) body = cmd_sl2(n, p);
        else if (*ker) body = cmd_kernel(n, p, d);
        else if (*tauc) body = cmd_tau(n, p, k);
        else if (*cen) body = cmd_census(n, all_p);
        else if (*cs) body = cmd_cs(max_m);
        else if (*br) body = cmd_bracket(left, right);
        else if (*nf) body = cmd_nf(input, K, trace, tau);
        else if (*outer) body = cmd_outer(input, mode, K, mu, trace);
        else body = cmd_verify(suite);
        body.command = r.command;
        r = std::move(body);
    } catch (const ParseError& e) {
        diag((std::string("parse.") + diagnostic_name(e.kind)).c_str(), (e.source.empty() ? "" : e.source + ":") + std::to_string(e.line) + ":" + std::to_string(e.col) + ": " + e.message);
        return kParse;
    } catch (const singular_binding& e) {
        diag("singular", e.what());
        return kSingular;
    } catch (const InputError& e) {
        diag("input", e.what());
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        diag("invalid", e.what());
        return kInvalid;
    } catch (const std::out_of_range& e) {
        diag("range", e.what());
        return kInvalid;
    } catch (const std::exception& e) {
        diag("internal", e.what());
        return kInternal;
    }
    std::cout << format_report(r, format);
    return r.ok() ? kOk : kVerdictFailed;
}
