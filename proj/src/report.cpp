#include "vesseltop/report.hpp"

#include <ostream>

#include "vesseltop/format.hpp"

namespace vesseltop {

namespace {

using nlohmann::ordered_json;

ordered_json centerline_json(const std::vector<std::pair<std::string, double>>& values) {
    ordered_json j = ordered_json::object();
    for (const auto& [name, v] : values) j[name] = round6(v);
    return j;
}

ordered_json summary_json(const MetricSummary& s) {
    ordered_json j;
    j["class_ids"] = s.class_ids;
    j["dice"] = round6(s.dice);
    j["centerline"] = centerline_json(s.centerline);
    j["betti_err"] = round6(s.betti_err);
    j["nsd"] = round6(s.nsd);
    return j;
}

void summary_rows(std::ostream& out, const std::string& scope, const std::string& id, const MetricSummary& s) {
    const std::string head = scope + ',' + id + ',';
    out << head << "dice," << format_number(s.dice) << '\n';
    for (const auto& [name, v] : s.centerline) out << head << name << ',' << format_number(v) << '\n';
    out << head << "betti_err," << format_number(s.betti_err) << '\n';
    out << head << "nsd," << format_number(s.nsd) << '\n';
}

}  // namespace

nlohmann::ordered_json report_to_json(const MetricReport& report) {
    ordered_json j;
    j["schema"] = kReportSchema;
    ordered_json shape;
    shape["dims"] = report.shape.dims();
    ordered_json spacing = ordered_json::array();
    for (double s : report.shape.spacings()) spacing.push_back(round6(s));
    shape["spacing"] = spacing;
    j["shape"] = shape;
    j["tolerance"] = round6(report.tolerance);
    j["variants"] = report.variants;

    ordered_json classes = ordered_json::array();
    for (const auto& c : report.per_class) {
        ordered_json e;
        e["class_id"] = c.class_id;
        e["r_max"] = round6(c.r_max);
        e["dice"] = round6(c.dice);
        e["centerline"] = centerline_json(c.centerline);
        e["betti_err"] = c.betti_err;
        e["nsd"] = round6(c.nsd);
        classes.push_back(std::move(e));
    }
    j["classes"] = classes;
    j["aggregate"] = summary_json(report.aggregate);
    ordered_json groups = ordered_json::object();
    for (const auto& [name, s] : report.groups) groups[name] = summary_json(s);
    j["groups"] = groups;
    return j;
}

void write_report_csv(std::ostream& out, const MetricReport& report) {
    out << "scope,id,metric,value\n";
    for (const auto& c : report.per_class) {
        const std::string head = "class," + std::to_string(c.class_id) + ',';
        out << head << "dice," << format_number(c.dice) << '\n';
        for (const auto& [name, v] : c.centerline) out << head << name << ',' << format_number(v) << '\n';
        out << head << "betti_err," << c.betti_err << '\n';
        out << head << "nsd," << format_number(c.nsd) << '\n';
        out << head << "r_max," << format_number(c.r_max) << '\n';
    }
    summary_rows(out, "aggregate", "all", report.aggregate);
    for (const auto& [name, s] : report.groups) summary_rows(out, "group", name, s);
}

}  // namespace vesseltop
