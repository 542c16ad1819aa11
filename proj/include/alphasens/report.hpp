#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alphasens/baselines.hpp"
#include "alphasens/classic_metrics.hpp"
#include "alphasens/metric_sensitivity.hpp"

namespace alphasens {

struct CrossingEvent {
    std::size_t other_variable = 0;
    double alpha = 0.0;  // interpolated in log alpha, inside the grid span
};

struct CurveDiagnostics {
    std::size_t variable_index = 0;
    double flatness_ratio = 1.0;  // ms_inf / ms_1, with 0/0 -> 1
    double relevance = 0.0;       // ms_inf relative to the largest ms_inf
    bool linear_like = false;
    bool irrelevant = false;
    bool localized_high_sensitivity = false;
    std::vector<CrossingEvent> crossing_events;  // this curve overtaking others

    std::vector<std::string> flag_names() const;
};

// Shape analysis of one output's curves. All curves must share the grid.
//   linear-like: flatness_ratio <= 1 + flat_tol
//   irrelevant:  ms_inf <= irrel_tol * max_j ms_inf
//   localized-high-sensitivity: not irrelevant, ms_1 below the median ms_1 of
//     the non-irrelevant variables, and the curve overtakes at least one
//     variable with a higher ms_1.
std::vector<CurveDiagnostics> diagnose(const std::vector<AlphaCurve>& curves,
                                       double flat_tol = 0.05, double irrel_tol = 0.01);

// SVG 1.1, one polyline per variable on a log alpha axis, asymptotes as
// detached markers in the right margin. Byte-deterministic for fixed input.
std::string render_alpha_curves(const std::vector<AlphaCurve>& curves,
                                const std::vector<CurveDiagnostics>& diagnostics,
                                const std::vector<std::string>& names);

// Scatter of (s_avg, s_sd) plus an s_sq bar chart, same determinism contract.
std::string render_sensitivity_plots(const std::vector<SensitivitySummary>& summaries,
                                     const std::vector<std::string>& names);

// ---- pipeline artifacts -------------------------------------------------

struct CurvesArtifact {
    std::vector<AlphaCurve> curves;
    std::vector<std::string> names;
    std::size_t output_index = 0;
};

struct ClassicArtifact {
    std::vector<SensitivitySummary> summaries;
    std::vector<std::string> names;
    double scale = 0.0;
    double eps_rel = 0.0;
};

struct PermArtifact {
    PermutationResult result;
    std::vector<std::string> names;
};

struct ShapArtifact {
    std::string function_name;
    std::vector<std::string> names;
    std::vector<double> mean_abs;
    double efficiency_max_abs_err = 0.0;
};

std::string curves_to_json(const CurvesArtifact& artifact);
CurvesArtifact curves_from_json(const std::string& text);

std::string classic_to_json(const ClassicArtifact& artifact);
ClassicArtifact classic_from_json(const std::string& text);

std::string perm_to_json(const PermArtifact& artifact);
PermArtifact perm_from_json(const std::string& text);

std::string shap_to_json(const ShapArtifact& artifact);
ShapArtifact shap_from_json(const std::string& text);

// ---- combined report ----------------------------------------------------

struct Report {
    std::string json_text;  // schema "alpha-sens/1"
    std::string markdown;
};

Report emit_report(const CurvesArtifact& curves, const std::vector<CurveDiagnostics>& diag,
                   const ClassicArtifact& classic,
                   const std::optional<PermArtifact>& permutation,
                   const std::optional<ShapArtifact>& shapley);

// Structural check of an "alpha-sens/1" document; throws SchemaError.
void validate_report_json(const std::string& text);

// Verdict precedence: irrelevant > localized > linear > nonlinear.
std::string verdict_for(const CurveDiagnostics& diag, const SensitivitySummary& summary);

}  // namespace alphasens
