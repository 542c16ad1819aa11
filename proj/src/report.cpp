#include "alphasens/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "alphasens/csv.hpp"
#include "alphasens/errors.hpp"

namespace alphasens {

namespace {

using nlohmann::json;

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void check_shared_grid(const std::vector<AlphaCurve>& curves) {
    if (curves.empty()) throw EmptyInputError("diagnose");
    const auto& ref = curves.front().points;
    for (const AlphaCurve& c : curves) {
        if (c.points.size() != ref.size()) throw GridMismatchError();
        for (std::size_t t = 0; t < ref.size(); ++t) {
            if (c.points[t].first != ref[t].first) throw GridMismatchError();
        }
    }
}

}  // namespace

std::vector<std::string> CurveDiagnostics::flag_names() const {
    std::vector<std::string> out;
    if (linear_like) out.push_back("linear-like");
    if (irrelevant) out.push_back("irrelevant");
    if (localized_high_sensitivity) out.push_back("localized-high-sensitivity");
    return out;
}

std::vector<CurveDiagnostics> diagnose(const std::vector<AlphaCurve>& curves, double flat_tol,
                                       double irrel_tol) {
    check_shared_grid(curves);
    const std::size_t n = curves.size();
    const std::size_t grid_size = curves.front().points.size();

    double max_asymptote = 0.0;
    for (const AlphaCurve& c : curves) max_asymptote = std::max(max_asymptote, c.asymptote);

    std::vector<CurveDiagnostics> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        CurveDiagnostics& d = out[j];
        d.variable_index = curves[j].variable_index;
        const double ms1 = curves[j].front();
        const double asym = curves[j].asymptote;
        d.flatness_ratio = ms1 > 0.0 ? asym / ms1 : 1.0;
        d.relevance = max_asymptote > 0.0 ? asym / max_asymptote : 1.0;
        d.linear_like = d.flatness_ratio <= 1.0 + flat_tol;
        d.irrelevant = asym <= irrel_tol * max_asymptote;
    }

    // Crossings: sign changes of curve differences, interpolated in log alpha.
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t o = 0; o < n; ++o) {
            if (o == j) continue;
            for (std::size_t t = 0; t + 1 < grid_size; ++t) {
                const double d0 = curves[j].value_at_index(t) - curves[o].value_at_index(t);
                const double d1 =
                    curves[j].value_at_index(t + 1) - curves[o].value_at_index(t + 1);
                if (d0 < 0.0 && d1 > 0.0) {
                    const double la = std::log(curves[j].points[t].first);
                    const double lb = std::log(curves[j].points[t + 1].first);
                    const double frac = -d0 / (d1 - d0);
                    out[j].crossing_events.push_back(
                        {curves[o].variable_index, std::exp(la + frac * (lb - la))});
                }
            }
        }
    }

    // Localized flag needs the median ms_1 of the variables that still matter;
    // including the exactly-zero irrelevant ones would pin the median at 0.
    std::vector<double> active_ms1;
    for (std::size_t j = 0; j < n; ++j) {
        if (!out[j].irrelevant) active_ms1.push_back(curves[j].front());
    }
    const double med = median_of(active_ms1);

    for (std::size_t j = 0; j < n; ++j) {
        if (out[j].irrelevant) continue;
        const double ms1 = curves[j].front();
        if (!(ms1 < med)) continue;
        for (const CrossingEvent& ev : out[j].crossing_events) {
            // events carry variable indices; resolve back to curve positions
            for (std::size_t o = 0; o < n; ++o) {
                if (curves[o].variable_index == ev.other_variable &&
                    curves[o].front() > ms1) {
                    out[j].localized_high_sensitivity = true;
                }
            }
        }
    }
    return out;
}

// ---- SVG ------------------------------------------------------------------

namespace {

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct LinearScale {
    double domain_lo = 0.0, domain_hi = 1.0;
    double range_lo = 0.0, range_hi = 1.0;
    double operator()(double v) const {
        const double t = (v - domain_lo) / (domain_hi - domain_lo);
        return range_lo + t * (range_hi - range_lo);
    }
};

// 1/2/5 ladder step covering hi with about `count` intervals.
double nice_step(double hi, int count) {
    const double raw = hi / count;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double mult : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * mult >= raw) return mag * mult;
    }
    return mag * 10.0;
}

}  // namespace

std::string render_alpha_curves(const std::vector<AlphaCurve>& curves,
                                const std::vector<CurveDiagnostics>& diagnostics,
                                const std::vector<std::string>& names) {
    if (curves.empty()) throw EmptyInputError("render_alpha_curves");
    check_shared_grid(curves);
    if (names.size() != curves.size() || diagnostics.size() != curves.size()) {
        throw DimensionMismatchError("curves vs names/diagnostics");
    }

    const double width = 760, height = 480;
    const double left = 64, right = width - 120, top = 24, bottom = height - 52;

    const double alpha_lo = curves.front().points.front().first;
    const double alpha_hi = curves.front().points.back().first;
    double y_max = 0.0;
    for (const AlphaCurve& c : curves) y_max = std::max(y_max, c.asymptote);
    if (y_max == 0.0) y_max = 1.0;
    y_max *= 1.06;

    LinearScale x{std::log(alpha_lo), std::log(alpha_hi), left, right};
    LinearScale y{0.0, y_max, bottom, top};

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    // axes
    svg << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(bottom) << "\" x2=\""
        << fmt2(right) << "\" y2=\"" << fmt2(bottom)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(top) << "\" x2=\"" << fmt2(left)
        << "\" y2=\"" << fmt2(bottom) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    // x ticks: powers of two inside the grid span, plus the endpoints
    std::vector<double> xticks{alpha_lo};
    for (double t = 2.0; t < alpha_hi; t *= 2.0) {
        if (t > alpha_lo) xticks.push_back(t);
    }
    if (xticks.back() != alpha_hi) xticks.push_back(alpha_hi);
    for (double t : xticks) {
        const double px = x(std::log(t));
        svg << "<line x1=\"" << fmt2(px) << "\" y1=\"" << fmt2(bottom) << "\" x2=\""
            << fmt2(px) << "\" y2=\"" << fmt2(bottom + 5)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt2(px) << "\" y=\"" << fmt2(bottom + 18)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << fmt_tick(t) << "</text>\n";
    }
    svg << "<text x=\"" << fmt2((left + right) / 2) << "\" y=\"" << fmt2(height - 14)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">alpha "
           "(log scale)</text>\n";

    // y ticks
    const double ystep = nice_step(y_max, 5);
    for (double t = 0.0; t <= y_max + 1e-12 * y_max; t += ystep) {
        const double py = y(t);
        svg << "<line x1=\"" << fmt2(left - 5) << "\" y1=\"" << fmt2(py) << "\" x2=\""
            << fmt2(left) << "\" y2=\"" << fmt2(py)
            << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt2(left - 9) << "\" y=\"" << fmt2(py + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << fmt_tick(t) << "</text>\n";
    }
    svg << "<text x=\"16\" y=\"" << fmt2((top + bottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 16 "
        << fmt2((top + bottom) / 2) << ")\">ms^alpha</text>\n";

    // curves
    for (std::size_t j = 0; j < curves.size(); ++j) {
        const char* color = kPalette[j % 10];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t t = 0; t < curves[j].points.size(); ++t) {
            if (t) svg << ' ';
            svg << fmt2(x(std::log(curves[j].points[t].first))) << ','
                << fmt2(y(curves[j].points[t].second));
        }
        svg << "\"/>\n";
    }

    // detached asymptote markers in the right margin
    for (std::size_t j = 0; j < curves.size(); ++j) {
        const char* color = kPalette[j % 10];
        const double py = y(curves[j].asymptote);
        svg << "<line x1=\"" << fmt2(right + 10) << "\" y1=\"" << fmt2(py) << "\" x2=\""
            << fmt2(right + 26) << "\" y2=\"" << fmt2(py) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.8\" stroke-dasharray=\"3,2\"/>\n";
        svg << "<circle cx=\"" << fmt2(right + 30) << "\" cy=\"" << fmt2(py)
            << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    svg << "<text x=\"" << fmt2(right + 18) << "\" y=\"" << fmt2(top - 8)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">ms^inf"
        << "</text>\n";

    // legend
    for (std::size_t j = 0; j < curves.size(); ++j) {
        const char* color = kPalette[j % 10];
        const double ly = top + 14 + 16 * static_cast<double>(j);
        svg << "<line x1=\"" << fmt2(left + 10) << "\" y1=\"" << fmt2(ly - 4) << "\" x2=\""
            << fmt2(left + 28) << "\" y2=\"" << fmt2(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.8\"/>\n";
        std::string label = names[j];
        const auto flags = diagnostics[j].flag_names();
        if (!flags.empty()) {
            label += " (";
            for (std::size_t f = 0; f < flags.size(); ++f) {
                if (f) label += ", ";
                label += flags[f];
            }
            label += ")";
        }
        svg << "<text x=\"" << fmt2(left + 34) << "\" y=\"" << fmt2(ly)
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(label)
            << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

std::string render_sensitivity_plots(const std::vector<SensitivitySummary>& summaries,
                                     const std::vector<std::string>& names) {
    if (summaries.empty()) throw EmptyInputError("render_sensitivity_plots");
    if (names.size() != summaries.size()) {
        throw DimensionMismatchError("summaries vs names");
    }

    const double width = 760, height = 400;
    // left panel: (s_avg, s_sd) scatter
    const double l_left = 56, l_right = 356, l_top = 32, l_bottom = height - 48;
    // right panel: s_sq bars
    const double r_left = 420, r_right = width - 20, r_top = 32, r_bottom = height - 48;

    double avg_abs = 0.0, sd_max = 0.0, sq_max = 0.0;
    for (const auto& s : summaries) {
        avg_abs = std::max(avg_abs, std::abs(s.s_avg));
        sd_max = std::max(sd_max, s.s_sd);
        sq_max = std::max(sq_max, s.s_sq);
    }
    if (avg_abs == 0.0) avg_abs = 1.0;
    if (sd_max == 0.0) sd_max = 1.0;
    if (sq_max == 0.0) sq_max = 1.0;
    avg_abs *= 1.15;
    sd_max *= 1.15;
    sq_max *= 1.08;

    LinearScale sx{-avg_abs, avg_abs, l_left, l_right};
    LinearScale sy{0.0, sd_max, l_bottom, l_top};
    LinearScale by{0.0, sq_max, r_bottom, r_top};

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    svg << "<text x=\"" << fmt2((l_left + l_right) / 2)
        << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\">mean vs sd of sensitivities</text>\n";
    svg << "<text x=\"" << fmt2((r_left + r_right) / 2)
        << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\" "
           "text-anchor=\"middle\">root mean squared sensitivity</text>\n";

    // scatter axes (y axis at s_avg = 0)
    svg << "<line x1=\"" << fmt2(l_left) << "\" y1=\"" << fmt2(l_bottom) << "\" x2=\""
        << fmt2(l_right) << "\" y2=\"" << fmt2(l_bottom)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt2(sx(0.0)) << "\" y1=\"" << fmt2(l_top) << "\" x2=\""
        << fmt2(sx(0.0)) << "\" y2=\"" << fmt2(l_bottom)
        << "\" stroke=\"#999999\" stroke-width=\"0.8\" stroke-dasharray=\"4,3\"/>\n";
    for (double t : {-avg_abs / 1.15, 0.0, avg_abs / 1.15}) {
        svg << "<text x=\"" << fmt2(sx(t)) << "\" y=\"" << fmt2(l_bottom + 16)
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
            << fmt_tick(t) << "</text>\n";
    }
    svg << "<text x=\"" << fmt2((l_left + l_right) / 2) << "\" y=\"" << fmt2(height - 14)
        << "\" font-family=\"sans-serif\" font-size=\"11\" "
           "text-anchor=\"middle\">s_avg</text>\n";
    svg << "<text x=\"18\" y=\"" << fmt2((l_top + l_bottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 "
        << fmt2((l_top + l_bottom) / 2) << ")\">s_sd</text>\n";

    for (std::size_t j = 0; j < summaries.size(); ++j) {
        const char* color = kPalette[j % 10];
        const double px = sx(summaries[j].s_avg);
        const double py = sy(summaries[j].s_sd);
        svg << "<circle cx=\"" << fmt2(px) << "\" cy=\"" << fmt2(py) << "\" r=\"4\" fill=\""
            << color << "\"/>\n";
        svg << "<text x=\"" << fmt2(px + 6) << "\" y=\"" << fmt2(py - 5)
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << xml_escape(names[j])
            << "</text>\n";
    }

    // bars
    const double band = (r_right - r_left) / static_cast<double>(summaries.size());
    svg << "<line x1=\"" << fmt2(r_left) << "\" y1=\"" << fmt2(r_bottom) << "\" x2=\""
        << fmt2(r_right) << "\" y2=\"" << fmt2(r_bottom)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (std::size_t j = 0; j < summaries.size(); ++j) {
        const char* color = kPalette[j % 10];
        const double bx = r_left + band * static_cast<double>(j) + band * 0.15;
        const double bw = band * 0.7;
        const double py = by(summaries[j].s_sq);
        svg << "<rect x=\"" << fmt2(bx) << "\" y=\"" << fmt2(py) << "\" width=\"" << fmt2(bw)
            << "\" height=\"" << fmt2(r_bottom - py) << "\" fill=\"" << color << "\"/>\n";
        svg << "<text x=\"" << fmt2(bx + bw / 2) << "\" y=\"" << fmt2(r_bottom + 14)
            << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
            << xml_escape(names[j]) << "</text>\n";
        svg << "<text x=\"" << fmt2(bx + bw / 2) << "\" y=\"" << fmt2(py - 4)
            << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"middle\">"
            << fmt_tick(summaries[j].s_sq) << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

// ---- artifact serialization -------------------------------------------------

namespace {

json curve_to_json(const AlphaCurve& curve) {
    json points = json::array();
    for (const auto& [a, v] : curve.points) points.push_back({a, v});
    return json{{"variable", curve.variable_index},
                {"points", std::move(points)},
                {"asymptote", curve.asymptote}};
}

AlphaCurve curve_from_json(const json& doc) {
    std::vector<std::pair<double, double>> points;
    for (const auto& p : doc.at("points")) {
        points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    return AlphaCurve(doc.at("variable").get<std::size_t>(), std::move(points),
                      doc.at("asymptote").get<double>());
}

json parse_or_throw(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("(root)", e.what());
    }
}

void expect_schema(const json& doc, const std::string& id) {
    if (!doc.contains("schema") || doc["schema"] != id) {
        throw SchemaError("schema", "expected '" + id + "'");
    }
}

}  // namespace

std::string curves_to_json(const CurvesArtifact& artifact) {
    json doc;
    doc["schema"] = "alpha-sens-curves/1";
    doc["feature_names"] = artifact.names;
    doc["output"] = artifact.output_index;
    json alphas = json::array();
    for (const auto& [a, v] : artifact.curves.front().points) alphas.push_back(a);
    doc["alphas"] = std::move(alphas);
    json curves = json::array();
    for (const AlphaCurve& c : artifact.curves) curves.push_back(curve_to_json(c));
    doc["curves"] = std::move(curves);
    return doc.dump(2) + "\n";
}

CurvesArtifact curves_from_json(const std::string& text) {
    const json doc = parse_or_throw(text);
    expect_schema(doc, "alpha-sens-curves/1");
    CurvesArtifact out;
    try {
        out.names = doc.at("feature_names").get<std::vector<std::string>>();
        out.output_index = doc.value("output", std::size_t{0});
        for (const auto& c : doc.at("curves")) out.curves.push_back(curve_from_json(c));
    } catch (const json::exception& e) {
        throw SchemaError("(curves)", e.what());
    }
    if (out.curves.empty()) throw SchemaError("curves", "empty");
    if (out.names.size() != out.curves.size()) {
        throw SchemaError("feature_names", "size mismatch with curves");
    }
    return out;
}

std::string classic_to_json(const ClassicArtifact& artifact) {
    json doc;
    doc["schema"] = "alpha-sens-classic/1";
    doc["feature_names"] = artifact.names;
    doc["scale"] = artifact.scale;
    doc["eps_rel"] = artifact.eps_rel;
    json rows = json::array();
    for (const SensitivitySummary& s : artifact.summaries) {
        rows.push_back({{"variable", s.variable_index},
                        {"s_avg", s.s_avg},
                        {"s_sd", s.s_sd},
                        {"s_sq", s.s_sq},
                        {"label", to_string(s.label)}});
    }
    doc["summaries"] = std::move(rows);
    return doc.dump(2) + "\n";
}

ClassicArtifact classic_from_json(const std::string& text) {
    const json doc = parse_or_throw(text);
    expect_schema(doc, "alpha-sens-classic/1");
    ClassicArtifact out;
    try {
        out.names = doc.at("feature_names").get<std::vector<std::string>>();
        out.scale = doc.at("scale").get<double>();
        out.eps_rel = doc.at("eps_rel").get<double>();
        for (const auto& row : doc.at("summaries")) {
            SensitivitySummary s;
            s.variable_index = row.at("variable").get<std::size_t>();
            s.s_avg = row.at("s_avg").get<double>();
            s.s_sd = row.at("s_sd").get<double>();
            s.s_sq = row.at("s_sq").get<double>();
            s.label = variable_label_from_string(row.at("label").get<std::string>());
            out.summaries.push_back(s);
        }
    } catch (const json::exception& e) {
        throw SchemaError("(classic)", e.what());
    }
    return out;
}

std::string perm_to_json(const PermArtifact& artifact) {
    json doc;
    doc["schema"] = "alpha-sens-perm/1";
    doc["feature_names"] = artifact.names;
    doc["metric"] = artifact.result.metric_name;
    doc["seed"] = artifact.result.seed;
    doc["baseline_error"] = artifact.result.baseline_error;
    doc["importances"] = artifact.result.importance;
    doc["per_repeat"] = artifact.result.per_repeat;
    return doc.dump(2) + "\n";
}

PermArtifact perm_from_json(const std::string& text) {
    const json doc = parse_or_throw(text);
    expect_schema(doc, "alpha-sens-perm/1");
    PermArtifact out;
    try {
        out.names = doc.at("feature_names").get<std::vector<std::string>>();
        out.result.metric_name = doc.at("metric").get<std::string>();
        out.result.seed = doc.at("seed").get<std::uint64_t>();
        out.result.baseline_error = doc.at("baseline_error").get<double>();
        out.result.importance = doc.at("importances").get<std::vector<double>>();
        out.result.per_repeat =
            doc.at("per_repeat").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw SchemaError("(perm)", e.what());
    }
    return out;
}

std::string shap_to_json(const ShapArtifact& artifact) {
    json doc;
    doc["schema"] = "alpha-sens-shap/1";
    doc["function"] = artifact.function_name;
    doc["feature_names"] = artifact.names;
    doc["mean_abs"] = artifact.mean_abs;
    doc["efficiency_max_abs_err"] = artifact.efficiency_max_abs_err;
    return doc.dump(2) + "\n";
}

ShapArtifact shap_from_json(const std::string& text) {
    const json doc = parse_or_throw(text);
    expect_schema(doc, "alpha-sens-shap/1");
    ShapArtifact out;
    try {
        out.function_name = doc.at("function").get<std::string>();
        out.names = doc.at("feature_names").get<std::vector<std::string>>();
        out.mean_abs = doc.at("mean_abs").get<std::vector<double>>();
        out.efficiency_max_abs_err = doc.at("efficiency_max_abs_err").get<double>();
    } catch (const json::exception& e) {
        throw SchemaError("(shap)", e.what());
    }
    return out;
}

// ---- combined report --------------------------------------------------------

std::string verdict_for(const CurveDiagnostics& diag, const SensitivitySummary& summary) {
    if (diag.irrelevant) return "irrelevant";
    if (diag.localized_high_sensitivity) return "localized";
    if (diag.linear_like) return "linear";
    if (summary.label == VariableLabel::kLinear) return "linear";
    return "nonlinear";
}

namespace {

std::string interpretation_sentence(const CurveDiagnostics& d, const std::string& name,
                                    const std::map<std::size_t, std::string>& name_of) {
    char buf[160];
    if (d.irrelevant) {
        return name + ": the whole curve sits at zero relative to the other variables; the "
                      "model output does not depend on it.";
    }
    if (d.localized_high_sensitivity) {
        std::string s = name + ": low sensitivity at small alpha, but the curve rises";
        if (!d.crossing_events.empty()) {
            const auto& ev = d.crossing_events.front();
            const auto it = name_of.find(ev.other_variable);
            const std::string other =
                it != name_of.end() ? it->second : "X" + std::to_string(ev.other_variable + 1);
            std::snprintf(buf, sizeof(buf), " and overtakes %s near alpha = %.3g",
                          other.c_str(), ev.alpha);
            s += buf;
        }
        s += "; a small input region drives an outsized share of the output variation.";
        return s;
    }
    if (d.linear_like) {
        std::snprintf(buf, sizeof(buf),
                      "%s: flat curve (ms^inf / ms^1 = %.3g); the partial derivative is "
                      "essentially constant, so the dependence is linear.",
                      name.c_str(), d.flatness_ratio);
        return buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "%s: rising curve (ms^inf / ms^1 = %.3g); the derivative varies across "
                  "the dataset, so the dependence is nonlinear.",
                  name.c_str(), d.flatness_ratio);
    return buf;
}

}  // namespace

Report emit_report(const CurvesArtifact& curves, const std::vector<CurveDiagnostics>& diag,
                   const ClassicArtifact& classic,
                   const std::optional<PermArtifact>& permutation,
                   const std::optional<ShapArtifact>& shapley) {
    const std::size_t n = curves.curves.size();
    if (diag.size() != n || classic.summaries.size() != n) {
        throw DimensionMismatchError("report inputs disagree on variable count");
    }
    const auto& names = curves.names;

    json doc;
    doc["schema"] = "alpha-sens/1";
    doc["feature_names"] = names;
    json alphas = json::array();
    for (const auto& [a, v] : curves.curves.front().points) alphas.push_back(a);
    doc["alphas"] = std::move(alphas);

    json jcurves = json::array();
    for (const AlphaCurve& c : curves.curves) jcurves.push_back(curve_to_json(c));
    doc["curves"] = std::move(jcurves);

    json jdiag = json::array();
    for (const CurveDiagnostics& d : diag) {
        json crossings = json::array();
        for (const CrossingEvent& ev : d.crossing_events) {
            crossings.push_back({{"other", ev.other_variable}, {"alpha", ev.alpha}});
        }
        jdiag.push_back({{"variable", d.variable_index},
                         {"flatness_ratio", d.flatness_ratio},
                         {"relevance", d.relevance},
                         {"flags", d.flag_names()},
                         {"crossings", std::move(crossings)}});
    }
    doc["diagnostics"] = std::move(jdiag);

    json jclassic = json::array();
    for (const SensitivitySummary& s : classic.summaries) {
        jclassic.push_back({{"variable", s.variable_index},
                            {"s_avg", s.s_avg},
                            {"s_sd", s.s_sd},
                            {"s_sq", s.s_sq},
                            {"label", to_string(s.label)}});
    }
    doc["classic"] = std::move(jclassic);

    json verdicts = json::array();
    std::vector<std::string> verdict_strings(n);
    for (std::size_t j = 0; j < n; ++j) {
        verdict_strings[j] = verdict_for(diag[j], classic.summaries[j]);
        verdicts.push_back(
            {{"variable", j}, {"name", names[j]}, {"verdict", verdict_strings[j]}});
    }
    doc["verdicts"] = std::move(verdicts);

    if (permutation) {
        doc["permutation"] = json{{"metric", permutation->result.metric_name},
                                  {"baseline_error", permutation->result.baseline_error},
                                  {"importances", permutation->result.importance}};
    }
    if (shapley) {
        doc["shapley"] = json{{"function", shapley->function_name},
                              {"mean_abs", shapley->mean_abs}};
    }

    // Markdown twin
    std::ostringstream md;
    md << "# Sensitivity analysis report\n\n";
    md << "Variables: " << n << ", alpha grid points: " << curves.curves.front().points.size()
       << ".\n\n";
    md << "## Verdicts\n\n";
    md << "| variable | verdict | ms^1 | ms^inf | flatness | s_avg | s_sd | s_sq | classic |\n";
    md << "|---|---|---|---|---|---|---|---|---|\n";
    for (std::size_t j = 0; j < n; ++j) {
        const AlphaCurve& c = curves.curves[j];
        const SensitivitySummary& s = classic.summaries[j];
        md << "| " << names[j] << " | " << verdict_strings[j] << " | "
           << fmt_tick(c.front()) << " | " << fmt_tick(c.asymptote) << " | "
           << fmt_tick(diag[j].flatness_ratio) << " | " << fmt_tick(s.s_avg) << " | "
           << fmt_tick(s.s_sd) << " | " << fmt_tick(s.s_sq) << " | " << to_string(s.label)
           << " |\n";
    }
    std::map<std::size_t, std::string> name_of;
    for (std::size_t j = 0; j < n; ++j) {
        name_of[curves.curves[j].variable_index] = names[j];
    }
    md << "\n## Curve shapes\n\n";
    for (std::size_t j = 0; j < n; ++j) {
        md << "- " << interpretation_sentence(diag[j], names[j], name_of) << "\n";
    }
    if (permutation) {
        md << "\n## Permutation importance (" << permutation->result.metric_name << ")\n\n";
        md << "| variable | mean error increase |\n|---|---|\n";
        for (std::size_t j = 0; j < permutation->result.importance.size(); ++j) {
            md << "| " << permutation->names[j] << " | "
               << fmt_tick(permutation->result.importance[j]) << " |\n";
        }
    }
    if (shapley) {
        md << "\n## Shapley importance (" << shapley->function_name << ")\n\n";
        md << "| variable | mean abs contribution |\n|---|---|\n";
        for (std::size_t j = 0; j < shapley->mean_abs.size(); ++j) {
            md << "| " << shapley->names[j] << " | " << fmt_tick(shapley->mean_abs[j])
               << " |\n";
        }
    }

    return {doc.dump(2) + "\n", md.str()};
}

void validate_report_json(const std::string& text) {
    const json doc = parse_or_throw(text);
    expect_schema(doc, "alpha-sens/1");
    for (const char* key : {"feature_names", "alphas", "curves", "diagnostics", "classic",
                            "verdicts"}) {
        if (!doc.contains(key)) throw SchemaError(key, "missing field");
        if (!doc[key].is_array()) throw SchemaError(key, "expected an array");
    }
    const std::size_t n = doc["feature_names"].size();
    for (const char* key : {"curves", "diagnostics", "classic", "verdicts"}) {
        if (doc[key].size() != n) throw SchemaError(key, "size mismatch with feature_names");
    }
    for (const auto& c : doc["curves"]) {
        for (const char* key : {"variable", "points", "asymptote"}) {
            if (!c.contains(key)) throw SchemaError(std::string("curves.") + key, "missing");
        }
        if (c["points"].size() != doc["alphas"].size()) {
            throw SchemaError("curves.points", "size mismatch with alphas");
        }
    }
    for (const auto& v : doc["verdicts"]) {
        if (!v.contains("verdict")) throw SchemaError("verdicts.verdict", "missing");
        const std::string verdict = v["verdict"].get<std::string>();
        if (verdict != "linear" && verdict != "nonlinear" && verdict != "irrelevant" &&
            verdict != "localized") {
            throw SchemaError("verdicts.verdict", "unknown verdict '" + verdict + "'");
        }
    }
}

}  // namespace alphasens
