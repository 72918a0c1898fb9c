#ifndef FFNF_REPORT_HPP
#define FFNF_REPORT_HPP

#include "census.hpp"
#include "dsl.hpp"
#include "transform.hpp"

#include <json.hpp>

namespace ffnf {

using json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

struct Report {
    std::vector<std::string> command;
    json results = json::object();
    std::vector<std::string> text;  // text-mode body
    std::optional<json> trace;
    std::vector<Verdict> verdicts;

    bool ok() const {
        for (auto& v : verdicts)
            if (!v.ok) return false;
        return true;
    }
};

inline json generator_to_json(const std::variant<VectorField, OuterGenerator>& g) {
    if (auto* Y = std::get_if<VectorField>(&g)) return {{"type", "field"}, {"field", render_field(*Y)}};
    auto& o = std::get<OuterGenerator>(g);
    return {{"type", "outer"}, {"block", o.block}, {"ring_part", o.ring_part.render()}, {"field", render_field(o.field_part)}};
}

inline json trace_to_json(const NormalFormTrace& tr, bool with_snapshots = true) {
    json steps = json::array();
    for (auto& s : tr.steps) {
        json j = {{"kind", kind_name(s.kind)}, {"grade", s.grade}, {"component", s.component}, {"label", s.label},
                  {"generator", generator_to_json(s.generator)}};
        if (with_snapshots) j["before"] = render_field(s.before), j["after"] = render_field(s.after);
        steps.push_back(j);
    }
    json v = json::array();
    for (auto& x : tr.verdicts) v.push_back({{"name", x.name}, {"ok", x.ok}, {"detail", x.detail}});
    return {{"input", field_to_dsl(tr.input)},
            {"truncation_degree", tr.truncation_degree},
            {"residual_basis", tr.residual_basis},
            {"steps", steps},
            {"output", field_to_dsl(tr.output)},
            {"verdicts", v},
            {"notes", tr.notes}};
}

inline json census_to_json(int n, const std::vector<std::pair<int, UPoly>>& rows) {
    json out = {{"n", n}, {"rows", json::array()}};
    for (auto& [p, u] : rows) {
        json w = json::object();
        for (auto& [e, c] : u) w[std::to_string(e)] = c;
        out["rows"].push_back({{"p", p}, {"weights", w}, {"text", render_upoly(u)}});
    }
    return out;
}

inline std::vector<std::pair<int, UPoly>> census_from_json(const json& j) {
    std::vector<std::pair<int, UPoly>> rows;
    for (auto& r : j.at("rows")) {
        UPoly u;
        for (auto& [k, v] : r.at("weights").items()) u[std::stol(k)] = v.get<long>();
        rows.emplace_back(r.at("p").get<int>(), u);
    }
    return rows;
}

inline std::string format_report(const Report& r, const std::string& format) {
    if (format == "json") {
        json doc = {{"schema", kReportSchema}, {"command", r.command}, {"results", r.results}};
        json v = json::array();
        for (auto& x : r.verdicts) v.push_back({{"name", x.name}, {"ok", x.ok}, {"detail", x.detail}});
        doc["verdicts"] = v;
        if (r.trace) doc["trace"] = *r.trace;
        return doc.dump(2) + "\n";
    }
    if (format != "text") throw std::invalid_argument("unknown format " + format);
    std::string out;
    for (auto& l : r.text) out += l + "\n";
    for (auto& x : r.verdicts)
        out += "verdict " + x.name + ": " + (x.ok ? "pass" : "FAIL") + (x.detail.empty() ? "" : " (" + x.detail + ")") + "\n";
    return out;
}

} // namespace ffnf

#endif
