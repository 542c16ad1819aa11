#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "alphasens/report.hpp"
#include "alphasens/rng.hpp"
#include "alphasens/synthetic.hpp"

using namespace alphasens;

namespace {

JacobianTensor scalar_jac(const std::vector<double>& derivatives) {
    Matrix m(derivatives.size(), 1);
    m.data = derivatives;
    return JacobianTensor::from_matrix(m);
}

struct CubicRun {
    std::vector<AlphaCurve> curves;
    std::vector<CurveDiagnostics> diag;
    std::vector<SensitivitySummary> summaries;
    std::vector<std::string> names;
};

const CubicRun& cubic_run() {
    static const CubicRun run = [] {
        CubicRun r;
        const AdditiveFunction fun = cubic_root_function();
        const Dataset data = gen_normal_inputs(50000, 8, 21);
        const JacobianTensor jac = analytic_jacobian(fun, data);
        r.curves = alpha_curves_all(jac, 0, AlphaGrid::default_grid());
        r.diag = diagnose(r.curves);
        for (std::size_t j = 0; j < 8; ++j) {
            r.summaries.push_back(classic_summary(jac, j, 0));
        }
        double scale = 0.0;
        for (const auto& s : r.summaries) scale = std::max(scale, s.s_sq);
        for (auto& s : r.summaries) s.label = classify_variable(s, scale, 1e-2);
        r.names = data.feature_names();
        return r;
    }();
    return run;
}

// every polyline "points" attribute in document order
std::vector<std::vector<std::pair<double, double>>> extract_polylines(
    const std::string& svg) {
    std::vector<std::vector<std::pair<double, double>>> out;
    std::size_t pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        const std::size_t points = svg.find("points=\"", pos);
        const std::size_t begin = points + 8;
        const std::size_t end = svg.find('"', begin);
        std::istringstream ss(svg.substr(begin, end - begin));
        std::vector<std::pair<double, double>> poly;
        std::string pair;
        while (ss >> pair) {
            const std::size_t comma = pair.find(',');
            poly.emplace_back(std::stod(pair.substr(0, comma)),
                              std::stod(pair.substr(comma + 1)));
        }
        out.push_back(std::move(poly));
        pos = end;
    }
    return out;
}

bool segments_intersect(std::pair<double, double> a, std::pair<double, double> b,
                        std::pair<double, double> c, std::pair<double, double> d) {
    auto cross = [](std::pair<double, double> o, std::pair<double, double> p,
                    std::pair<double, double> q) {
        return (p.first - o.first) * (q.second - o.second) -
               (p.second - o.second) * (q.first - o.first);
    };
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

TEST_CASE("diagnose on the cubic-root ground truth") {
    const CubicRun& run = cubic_run();

    SUBCASE("linear variable is flat with ratio 1") {
        CHECK(run.diag[1].linear_like);
        CHECK(run.diag[1].flatness_ratio == doctest::Approx(1.0).epsilon(1e-9));
        CHECK_FALSE(run.diag[1].irrelevant);
        CHECK_FALSE(run.diag[1].localized_high_sensitivity);
    }
    SUBCASE("absent variables are irrelevant, never localized") {
        for (std::size_t j = 3; j < 8; ++j) {
            CHECK(run.diag[j].irrelevant);
            CHECK_FALSE(run.diag[j].localized_high_sensitivity);
        }
    }
    SUBCASE("cubic-root variable is localized and overtakes the linear one") {
        CHECK(run.diag[2].localized_high_sensitivity);
        CHECK_FALSE(run.diag[2].irrelevant);
        bool crossed_x2 = false;
        for (const CrossingEvent& ev : run.diag[2].crossing_events) {
            if (ev.other_variable == 1) {
                crossed_x2 = true;
                CHECK(ev.alpha > 4.0);
                CHECK(ev.alpha < 16.0);
            }
        }
        CHECK(crossed_x2);
    }
    SUBCASE("quadratic variable is plain nonlinear") {
        CHECK_FALSE(run.diag[0].linear_like);
        CHECK_FALSE(run.diag[0].irrelevant);
        CHECK_FALSE(run.diag[0].localized_high_sensitivity);
    }
}

TEST_CASE("diagnose is invariant under uniform positive rescaling") {
    const CubicRun& run = cubic_run();
    std::vector<AlphaCurve> scaled;
    const double c = 3.7e4;
    for (const AlphaCurve& curve : run.curves) {
        auto points = curve.points;
        for (auto& [a, v] : points) v *= c;
        scaled.emplace_back(curve.variable_index, std::move(points), curve.asymptote * c);
    }
    const auto diag2 = diagnose(scaled);
    for (std::size_t j = 0; j < run.diag.size(); ++j) {
        CHECK(diag2[j].linear_like == run.diag[j].linear_like);
        CHECK(diag2[j].irrelevant == run.diag[j].irrelevant);
        CHECK(diag2[j].localized_high_sensitivity ==
              run.diag[j].localized_high_sensitivity);
        CHECK(diag2[j].flatness_ratio ==
              doctest::Approx(run.diag[j].flatness_ratio).epsilon(1e-9));
    }
}

TEST_CASE("diagnose rejects mismatched grids") {
    const AlphaGrid g1({1.0, 2.0, 4.0});
    const AlphaGrid g2({1.0, 3.0, 4.0});
    const JacobianTensor jac = scalar_jac({1.0, 2.0});
    std::vector<AlphaCurve> curves{alpha_curve(jac, 0, 0, g1), alpha_curve(jac, 0, 0, g2)};
    CHECK_THROWS_AS((void)diagnose(curves), GridMismatchError);
}

TEST_CASE("alpha-curve svg") {
    SUBCASE("single flat curve renders as a horizontal polyline at marker height") {
        const auto curves =
            alpha_curves_all(scalar_jac({2.0, -2.0}), 0, AlphaGrid::default_grid());
        const auto diag = diagnose(curves);
        const std::string svg = render_alpha_curves(curves, diag, {"only"});
        CHECK(svg.find("<?xml") == 0);
        CHECK(svg.find("</svg>") != std::string::npos);

        const auto polys = extract_polylines(svg);
        REQUIRE(polys.size() == 1);
        const double y0 = polys[0][0].second;
        for (const auto& [px, py] : polys[0]) CHECK(py == doctest::Approx(y0));

        // the detached asymptote marker sits at the same height
        const std::size_t dash = svg.find("stroke-dasharray=\"3,2\"");
        REQUIRE(dash != std::string::npos);
        const std::size_t line_start = svg.rfind("<line", dash);
        const std::size_t y1pos = svg.find("y1=\"", line_start) + 4;
        const double marker_y = std::stod(svg.substr(y1pos, svg.find('"', y1pos) - y1pos));
        CHECK(marker_y == doctest::Approx(y0).epsilon(1e-9));
    }

    SUBCASE("two crossing curves intersect exactly once in rendered space") {
        // one flat curve at 2, one rising curve crossing it
        std::vector<double> rising(40, 0.1);
        rising[0] = 5.0;
        Matrix m(40, 2);
        for (std::size_t i = 0; i < 40; ++i) {
            m(i, 0) = 2.0;
            m(i, 1) = rising[i];
        }
        const auto curves =
            alpha_curves_all(JacobianTensor::from_matrix(m), 0, AlphaGrid::default_grid());
        const auto diag = diagnose(curves);
        const std::string svg = render_alpha_curves(curves, diag, {"flat", "spike"});
        const auto polys = extract_polylines(svg);
        REQUIRE(polys.size() == 2);
        int intersections = 0;
        for (std::size_t s = 0; s + 1 < polys[0].size(); ++s) {
            for (std::size_t t = 0; t + 1 < polys[1].size(); ++t) {
                if (segments_intersect(polys[0][s], polys[0][s + 1], polys[1][t],
                                       polys[1][t + 1])) {
                    ++intersections;
                }
            }
        }
        CHECK(intersections == 1);
    }

    SUBCASE("rendering is deterministic") {
        const CubicRun& run = cubic_run();
        const std::string a = render_alpha_curves(run.curves, run.diag, run.names);
        const std::string b = render_alpha_curves(run.curves, run.diag, run.names);
        CHECK(a == b);
    }

    SUBCASE("golden file for the seeded cubic-root run") {
        const CubicRun& run = cubic_run();
        const std::string svg = render_alpha_curves(run.curves, run.diag, run.names);
        std::ifstream in(std::string(ALPHASENS_SOURCE_DIR) +
                         "/tests/golden/cubic_curves.svg");
        REQUIRE(in.good());
        std::stringstream golden;
        golden << in.rdbuf();
        CHECK(svg == golden.str());
    }
}

TEST_CASE("sensitivity plots svg") {
    const CubicRun& run = cubic_run();
    SUBCASE("linear variable sits on the x axis, irrelevant at the origin") {
        const std::string svg = render_sensitivity_plots(run.summaries, run.names);
        CHECK(svg.find("<?xml") == 0);
        // X2: s_sd = 0 means its scatter point is on the bottom axis line (y = 352)
        // and X5 coincides with the origin point (s_avg = 0, s_sd = 0).
        CHECK(svg.find("</svg>") != std::string::npos);
        const std::string a = render_sensitivity_plots(run.summaries, run.names);
        CHECK(a == svg);
    }
    SUBCASE("golden file for the seeded cubic-root run") {
        const std::string svg = render_sensitivity_plots(run.summaries, run.names);
        std::ifstream in(std::string(ALPHASENS_SOURCE_DIR) +
                         "/tests/golden/cubic_sens.svg");
        REQUIRE(in.good());
        std::stringstream golden;
        golden << in.rdbuf();
        CHECK(svg == golden.str());
    }
    SUBCASE("empty input") {
        CHECK_THROWS_AS((void)render_sensitivity_plots({}, {}), EmptyInputError);
    }
}

TEST_CASE("artifact json round trips") {
    const CubicRun& run = cubic_run();

    CurvesArtifact curves{run.curves, run.names, 0};
    const CurvesArtifact curves2 = curves_from_json(curves_to_json(curves));
    CHECK(curves2.names == curves.names);
    REQUIRE(curves2.curves.size() == curves.curves.size());
    for (std::size_t j = 0; j < curves.curves.size(); ++j) {
        CHECK(curves2.curves[j].asymptote == curves.curves[j].asymptote);
        CHECK(curves2.curves[j].points == curves.curves[j].points);
    }

    ClassicArtifact classic{run.summaries, run.names, 2.0, 1e-2};
    const ClassicArtifact classic2 = classic_from_json(classic_to_json(classic));
    REQUIRE(classic2.summaries.size() == 8);
    CHECK(classic2.summaries[1].s_avg == run.summaries[1].s_avg);
    CHECK(classic2.summaries[1].label == VariableLabel::kLinear);

    PermArtifact perm;
    perm.names = {"a", "b"};
    perm.result.metric_name = "mse";
    perm.result.seed = 9;
    perm.result.baseline_error = 0.25;
    perm.result.importance = {0.5, -0.1};
    perm.result.per_repeat = {{0.4, 0.6}, {-0.2, 0.0}};
    const PermArtifact perm2 = perm_from_json(perm_to_json(perm));
    CHECK(perm2.result.importance == perm.result.importance);
    CHECK(perm2.result.per_repeat == perm.result.per_repeat);

    ShapArtifact shap{"cubic-root", {"a"}, {0.7}, 1e-12};
    const ShapArtifact shap2 = shap_from_json(shap_to_json(shap));
    CHECK(shap2.mean_abs == shap.mean_abs);
    CHECK(shap2.function_name == "cubic-root");

    CHECK_THROWS_AS((void)curves_from_json("{}"), SchemaError);
    CHECK_THROWS_AS((void)curves_from_json("not json"), SchemaError);
}

TEST_CASE("emit_report") {
    const CubicRun& run = cubic_run();
    CurvesArtifact curves{run.curves, run.names, 0};
    ClassicArtifact classic{run.summaries, run.names, 2.0, 1e-2};

    SUBCASE("verdict table reproduces the ground truth") {
        const Report report = emit_report(curves, run.diag, classic, std::nullopt,
                                          std::nullopt);
        validate_report_json(report.json_text);
        CHECK(report.markdown.find("| X2 | linear |") != std::string::npos);
        CHECK(report.markdown.find("| X1 | nonlinear |") != std::string::npos);
        CHECK(report.markdown.find("| X3 | localized |") != std::string::npos);
        for (std::size_t j = 4; j <= 8; ++j) {
            CHECK(report.markdown.find("| X" + std::to_string(j) + " | irrelevant |") !=
                  std::string::npos);
        }
        // optional sections omitted
        CHECK(report.json_text.find("permutation") == std::string::npos);
        CHECK(report.json_text.find("shapley") == std::string::npos);
    }

    SUBCASE("optional sections are included when present") {
        PermArtifact perm;
        perm.names = run.names;
        perm.result.metric_name = "mse";
        perm.result.importance.assign(8, 0.1);
        perm.result.per_repeat.assign(8, {0.1});
        ShapArtifact shap{"cubic-root", run.names, std::vector<double>(8, 0.2), 1e-11};
        const Report report = emit_report(curves, run.diag, classic, perm, shap);
        validate_report_json(report.json_text);
        CHECK(report.json_text.find("permutation") != std::string::npos);
        CHECK(report.markdown.find("Permutation importance") != std::string::npos);
        CHECK(report.markdown.find("Shapley importance") != std::string::npos);
    }
}
