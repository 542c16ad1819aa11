#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "alphasens/baselines.hpp"
#include "alphasens/classic_metrics.hpp"
#include "alphasens/csv.hpp"
#include "alphasens/dataset.hpp"
#include "alphasens/errors.hpp"
#include "alphasens/metric_sensitivity.hpp"
#include "alphasens/mlp.hpp"
#include "alphasens/oracle.hpp"
#include "alphasens/parallel.hpp"
#include "alphasens/report.hpp"
#include "alphasens/rng.hpp"
#include "alphasens/synthetic.hpp"

namespace fs = std::filesystem;
using namespace alphasens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
}

// --alphas syntax: "lo:hi:geomK" for K geometric points, infinity implied.
AlphaGrid parse_alpha_grid(const std::string& text) {
    if (text.empty()) return AlphaGrid::default_grid();
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        text.compare(second + 1, 4, "geom") != 0) {
        throw Error("bad --alphas '" + text + "', expected lo:hi:geomK");
    }
    const double lo = std::stod(text.substr(0, first));
    const double hi = std::stod(text.substr(first + 1, second - first - 1));
    const auto count = static_cast<std::size_t>(std::stoul(text.substr(second + 5)));
    return AlphaGrid::geometric(lo, hi, count);
}

AdditiveFunction function_by_name(const std::string& name) {
    if (name == "cubic-root") return cubic_root_function();
    throw Error("unknown function '" + name + "' (available: cubic-root)");
}

struct PreparedData {
    Dataset standardized;          // features standardized, target rescaled
    StandardizationParams params;
};

PreparedData prepare(const std::string& data_path, const std::string& target_name,
                     bool need_target) {
    Dataset raw = load_dataset_csv(data_path, target_name);
    if (need_target && !raw.has_target()) throw MissingTargetError();
    auto [standardized, params] = standardize(raw);
    if (standardized.has_target()) {
        auto [rescaled, lo, hi] = rescale_target(standardized.target());
        params.target_min = lo;
        params.target_max = hi;
        params.has_target_range = true;
        standardized = standardized.with_target(std::move(rescaled));
    }
    return {std::move(standardized), std::move(params)};
}

int cmd_synth(std::size_t n, std::uint64_t seed, const std::string& out_dir) {
    const AdditiveFunction fun = cubic_root_function();
    Dataset inputs = gen_normal_inputs(n, fun.n_features(), seed);
    const std::vector<double> target = fun.evaluate_all(inputs);
    const JacobianTensor jac = analytic_jacobian(fun, inputs);

    fs::create_directories(out_dir);
    const std::string data_path = (fs::path(out_dir) / "dataset.csv").string();
    const std::string jac_path = (fs::path(out_dir) / "jacobian.csv").string();
    save_dataset_csv(inputs.with_target(target), data_path, "Y");
    save_jacobian_csv(jac, inputs.feature_names(), jac_path);
    std::cout << "wrote " << data_path << " (" << n << " samples) and " << jac_path << "\n";
    return kExitOk;
}

int cmd_train(const std::string& data, const std::string& target,
              const std::vector<std::size_t>& hidden, const std::string& activation,
              std::size_t epochs, std::size_t batch, double lr, const std::string& optimizer,
              std::uint64_t seed, const std::string& out) {
    PreparedData prep = prepare(data, target, /*need_target=*/true);

    std::vector<std::size_t> sizes;
    sizes.push_back(prep.standardized.n_features());
    for (std::size_t h : hidden) sizes.push_back(h);
    sizes.push_back(1);

    MlpModel model = MlpModel::init(sizes, activation_from_string(activation), seed);
    TrainConfig config;
    config.epochs = epochs;
    config.batch_size = batch;
    config.learning_rate = lr;
    config.optimizer = optimizer_from_string(optimizer);
    config.seed = mix_seed(seed, 1);

    TrainResult result = train(model, prep.standardized, config);
    save_model_file(result.model, out);
    std::cout << "initial mse " << format_double(result.loss_trace.front()) << ", final mse "
              << format_double(result.loss_trace.back()) << ", model -> " << out << "\n";
    return kExitOk;
}

int cmd_jacobian(const std::string& model_path, const std::string& data,
                 const std::string& target, const std::string& out) {
    const MlpModel model = load_model_file(model_path);
    PreparedData prep = prepare(data, target, /*need_target=*/false);
    const JacobianTensor jac = dataset_jacobian(model, prep.standardized);
    if (jac.n_outputs() == 1 && !out.ends_with(".json")) {
        save_jacobian_csv(jac, prep.standardized.feature_names(), out);
    } else {
        save_jacobian_json(jac, prep.standardized.feature_names(), out);
    }
    std::cout << "wrote " << out << " (" << jac.n_samples() << " x " << jac.n_outputs()
              << " x " << jac.n_features() << ")\n";
    return kExitOk;
}

int cmd_curves(const std::string& jac_path, const std::string& alphas, std::size_t output,
               double flat_tol, double irrel_tol, const std::string& out,
               const std::string& svg) {
    auto [jac, names] = load_jacobian_file(jac_path);
    const AlphaGrid grid = parse_alpha_grid(alphas);
    CurvesArtifact artifact{alpha_curves_all(jac, output, grid), names, output};
    write_text(out, curves_to_json(artifact));
    if (!svg.empty()) {
        const auto diag = diagnose(artifact.curves, flat_tol, irrel_tol);
        write_text(svg, render_alpha_curves(artifact.curves, diag, names));
    }
    std::cout << "wrote " << out << (svg.empty() ? "" : " and " + svg) << "\n";
    return kExitOk;
}

int cmd_classic(const std::string& jac_path, double eps, std::size_t output,
                const std::string& out, const std::string& svg) {
    auto [jac, names] = load_jacobian_file(jac_path);
    ClassicArtifact artifact;
    artifact.names = names;
    artifact.eps_rel = eps;
    for (std::size_t j = 0; j < jac.n_features(); ++j) {
        artifact.summaries.push_back(classic_summary(jac, j, output));
    }
    double scale = 0.0;
    for (const auto& s : artifact.summaries) scale = std::max(scale, s.s_sq);
    artifact.scale = scale;
    for (auto& s : artifact.summaries) {
        s.label = scale > 0.0 ? classify_variable(s, scale, eps) : VariableLabel::kIrrelevant;
    }
    write_text(out, classic_to_json(artifact));
    if (!svg.empty()) {
        write_text(svg, render_sensitivity_plots(artifact.summaries, names));
    }
    std::cout << "wrote " << out << (svg.empty() ? "" : " and " + svg) << "\n";
    return kExitOk;
}

int cmd_permute(const std::string& model_path, const std::string& data,
                const std::string& target, const std::string& metric, std::size_t repeats,
                std::uint64_t seed, const std::string& out) {
    const MlpModel model = load_model_file(model_path);
    PreparedData prep = prepare(data, target, /*need_target=*/true);

    Predictor predict = [&model](const Matrix& features) {
        std::vector<double> pred(features.rows);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(features.rows); ++i) {
            pred[static_cast<std::size_t>(i)] =
                forward(model, features.row(static_cast<std::size_t>(i)))[0];
        }
        return pred;
    };

    PermArtifact artifact{permutation_importance(predict, prep.standardized,
                                                 prep.standardized.target(),
                                                 error_metric_from_string(metric), repeats,
                                                 seed),
                          prep.standardized.feature_names()};
    write_text(out, perm_to_json(artifact));

    // CSV twin: one row per variable, repeats in columns
    std::string csv_path = out;
    if (csv_path.ends_with(".json")) csv_path.resize(csv_path.size() - 5);
    csv_path += ".csv";
    std::string csv = "variable,importance";
    for (std::size_t r = 0; r < repeats; ++r) csv += ",repeat_" + std::to_string(r);
    csv += '\n';
    for (std::size_t j = 0; j < artifact.names.size(); ++j) {
        csv += artifact.names[j] + ',' + format_double(artifact.result.importance[j]);
        for (double v : artifact.result.per_repeat[j]) csv += ',' + format_double(v);
        csv += '\n';
    }
    write_text(csv_path, csv);
    std::cout << "wrote " << out << " and " << csv_path << "\n";
    return kExitOk;
}

int cmd_shapley(const std::string& function, const std::string& data,
                const std::string& target, const std::string& out, bool full) {
    const AdditiveFunction fun = function_by_name(function);
    Dataset dataset = load_dataset_csv(data, target);
    if (dataset.n_features() != fun.n_features()) {
        throw DimensionMismatchError("function arity vs dataset width");
    }

    const std::size_t rows = dataset.n_samples();
    const std::vector<double> f_values = fun.evaluate_all(dataset);
    double f_mean = 0.0;
    for (double v : f_values) f_mean += v;
    f_mean /= static_cast<double>(rows);

    ShapArtifact artifact;
    artifact.function_name = function;
    artifact.names = dataset.feature_names();
    artifact.mean_abs.assign(fun.n_features(), 0.0);

    std::vector<std::vector<double>> all;
    if (full) all.resize(rows);
    double max_eff_err = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        const std::vector<double> phi =
            additive_shapley(fun, dataset, dataset.features().row(i));
        double total = 0.0;
        for (std::size_t j = 0; j < phi.size(); ++j) {
            artifact.mean_abs[j] += std::abs(phi[j]);
            total += phi[j];
        }
        max_eff_err = std::max(max_eff_err, std::abs(total - (f_values[i] - f_mean)));
        if (full) all[i] = phi;
    }
    for (double& v : artifact.mean_abs) v /= static_cast<double>(rows);
    artifact.efficiency_max_abs_err = max_eff_err;

    std::string text = shap_to_json(artifact);
    if (full) {
        // splice per-sample values into the document
        auto doc = nlohmann::json::parse(text);
        doc["values"] = all;
        text = doc.dump(2) + "\n";
    }
    write_text(out, text);
    std::cout << "wrote " << out << " (max efficiency residual "
              << format_double(max_eff_err) << ")\n";
    return kExitOk;
}

int cmd_report(const std::string& curves_path, const std::string& classic_path,
               const std::string& perm_path, const std::string& shap_path, double flat_tol,
               double irrel_tol, const std::string& out) {
    std::ifstream curves_in(curves_path), classic_in(classic_path);
    if (!curves_in) throw IoError("cannot open '" + curves_path + "' for reading");
    if (!classic_in) throw IoError("cannot open '" + classic_path + "' for reading");
    std::stringstream c1, c2;
    c1 << curves_in.rdbuf();
    c2 << classic_in.rdbuf();

    const CurvesArtifact curves = curves_from_json(c1.str());
    const ClassicArtifact classic = classic_from_json(c2.str());
    const auto diag = diagnose(curves.curves, flat_tol, irrel_tol);

    std::optional<PermArtifact> perm;
    if (!perm_path.empty()) {
        std::ifstream in(perm_path);
        if (!in) throw IoError("cannot open '" + perm_path + "' for reading");
        std::stringstream ss;
        ss << in.rdbuf();
        perm = perm_from_json(ss.str());
    }
    std::optional<ShapArtifact> shap;
    if (!shap_path.empty()) {
        std::ifstream in(shap_path);
        if (!in) throw IoError("cannot open '" + shap_path + "' for reading");
        std::stringstream ss;
        ss << in.rdbuf();
        shap = shap_from_json(ss.str());
    }

    const Report report = emit_report(curves, diag, classic, perm, shap);
    validate_report_json(report.json_text);

    write_text(out, report.markdown);
    std::string json_path = out;
    if (json_path.ends_with(".md")) json_path.resize(json_path.size() - 3);
    json_path += ".json";
    write_text(json_path, report.json_text);
    std::cout << "wrote " << out << " and " << json_path << "\n";
    return kExitOk;
}

int cmd_verify(std::uint64_t seed, std::size_t instances, std::size_t restarts,
               std::size_t iters) {
    const std::vector<double> grid = {1.0, 1.5, 2.0, 3.0, kInf};
    struct Cell {
        double max_low = 0.0;   // worst shortfall oracle vs closed form
        double max_high = 0.0;  // worst overshoot
        std::size_t count = 0;
        bool pass = true;
    };
    std::vector<std::vector<Cell>> cells(grid.size(), std::vector<Cell>(grid.size()));

    for (std::size_t inst = 0; inst < instances; ++inst) {
        Rng rng(mix_seed(seed, inst));
        const std::size_t n = 2 + rng.bounded(5);  // 2..6 samples
        const std::size_t m = 1 + rng.bounded(3);  // 1..3 outputs
        Matrix slice(n, m);
        for (double& v : slice.data) v = rng.normal();
        const JacobianTensor jac(n, m, 1, slice.data);

        for (std::size_t a = 0; a < grid.size(); ++a) {
            for (std::size_t b = 0; b < grid.size(); ++b) {
                const NormPair norms(grid[a], grid[b]);
                const double closed = sensitivity_pq(jac, 0, norms);
                const double est =
                    brute_force_operator_norm(slice, norms, restarts, iters,
                                              mix_seed(seed, inst, a * grid.size() + b))
                        .value;
                Cell& cell = cells[a][b];
                cell.count += 1;
                const double low = (closed - est) / closed;
                const double high = (est - closed) / closed;
                cell.max_low = std::max(cell.max_low, low);
                cell.max_high = std::max(cell.max_high, high);
                if (low > 1e-3 || high > 1e-9) cell.pass = false;
            }
        }
    }

    auto label = [](double v) {
        return v == kInf ? std::string("inf") : format_double(v);
    };
    bool all_pass = true;
    std::printf("%-6s %-6s %-8s %-14s %-14s %s\n", "p", "q", "cases", "max shortfall",
                "max overshoot", "status");
    for (std::size_t a = 0; a < grid.size(); ++a) {
        for (std::size_t b = 0; b < grid.size(); ++b) {
            const Cell& cell = cells[a][b];
            all_pass = all_pass && cell.pass;
            std::printf("%-6s %-6s %-8zu %-14.3e %-14.3e %s\n", label(grid[a]).c_str(),
                        label(grid[b]).c_str(), cell.count, cell.max_low, cell.max_high,
                        cell.pass ? "PASS" : "FAIL");
        }
    }
    std::printf("%s: %zu instances, closed form vs projected-gradient oracle\n",
                all_pass ? "PASS" : "FAIL", instances);
    return all_pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    parallel::apply_thread_env();

    CLI::App app{"alpha-curve sensitivity analysis for differentiable models"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate the synthetic benchmark dataset");
    std::size_t synth_n = 50000;
    std::uint64_t synth_seed = 1;
    std::string synth_out = "synth";
    synth->add_option("--n", synth_n, "number of samples");
    synth->add_option("--seed", synth_seed, "rng seed");
    synth->add_option("--out", synth_out, "output directory")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train an MLP surrogate on a CSV dataset");
    std::string train_data, train_target = "Y", train_out = "model.json";
    std::vector<std::size_t> train_hidden = {32};
    std::string train_activation = "tanh", train_optimizer = "adam";
    std::size_t train_epochs = 40, train_batch = 64;
    double train_lr = 1e-2;
    std::uint64_t train_seed = 1;
    train_cmd->add_option("--data", train_data, "input CSV")->required();
    train_cmd->add_option("--target", train_target, "target column name");
    train_cmd->add_option("--hidden", train_hidden, "hidden layer sizes");
    train_cmd->add_option("--activation", train_activation, "tanh|sigmoid|softplus");
    train_cmd->add_option("--epochs", train_epochs, "training epochs");
    train_cmd->add_option("--batch", train_batch, "mini-batch size");
    train_cmd->add_option("--lr", train_lr, "learning rate");
    train_cmd->add_option("--optimizer", train_optimizer, "sgd|adam");
    train_cmd->add_option("--seed", train_seed, "rng seed");
    train_cmd->add_option("--out", train_out, "model JSON path")->required();

    // jacobian
    auto* jac_cmd = app.add_subcommand("jacobian", "evaluate a model's input Jacobian");
    std::string jac_model, jac_data, jac_target, jac_out = "jac.csv";
    jac_cmd->add_option("--model", jac_model, "model JSON")->required();
    jac_cmd->add_option("--data", jac_data, "input CSV")->required();
    jac_cmd->add_option("--target", jac_target, "target column to exclude");
    jac_cmd->add_option("--out", jac_out, "output path (.csv or .json)")->required();

    // curves
    auto* curves_cmd = app.add_subcommand("curves", "compute alpha-curves from a Jacobian");
    std::string curves_jac, curves_alphas, curves_out = "curves.json", curves_svg;
    std::size_t curves_output = 0;
    double curves_flat_tol = 0.05, curves_irrel_tol = 0.01;
    curves_cmd->add_option("--jac", curves_jac, "jacobian file")->required();
    curves_cmd->add_option("--alphas", curves_alphas, "grid spec lo:hi:geomK");
    curves_cmd->add_option("--output", curves_output, "output index for m > 1");
    curves_cmd->add_option("--flat-tol", curves_flat_tol, "linear-like tolerance");
    curves_cmd->add_option("--irrel-tol", curves_irrel_tol, "irrelevance tolerance");
    curves_cmd->add_option("--out", curves_out, "curves JSON path")->required();
    curves_cmd->add_option("--svg", curves_svg, "optional SVG path");

    // classic
    auto* classic_cmd = app.add_subcommand("classic", "classic sensitivity summaries");
    std::string classic_jac, classic_out = "classic.json", classic_svg;
    double classic_eps = 1e-2;
    std::size_t classic_output = 0;
    classic_cmd->add_option("--jac", classic_jac, "jacobian file")->required();
    classic_cmd->add_option("--eps", classic_eps, "relative threshold for labels");
    classic_cmd->add_option("--output", classic_output, "output index for m > 1");
    classic_cmd->add_option("--out", classic_out, "summaries JSON path")->required();
    classic_cmd->add_option("--svg", classic_svg, "optional SVG path");

    // permute
    auto* perm_cmd = app.add_subcommand("permute", "permutation importance baseline");
    std::string perm_model, perm_data, perm_target = "Y", perm_metric = "mse";
    std::string perm_out = "perm.json";
    std::size_t perm_repeats = 10;
    std::uint64_t perm_seed = 1;
    perm_cmd->add_option("--model", perm_model, "model JSON")->required();
    perm_cmd->add_option("--data", perm_data, "input CSV")->required();
    perm_cmd->add_option("--target", perm_target, "target column name");
    perm_cmd->add_option("--metric", perm_metric, "mse|mae");
    perm_cmd->add_option("--repeats", perm_repeats, "shuffles per variable");
    perm_cmd->add_option("--seed", perm_seed, "rng seed");
    perm_cmd->add_option("--out", perm_out, "output JSON path")->required();

    // shapley
    auto* shap_cmd = app.add_subcommand("shapley", "exact Shapley values (additive models)");
    std::string shap_function = "cubic-root", shap_data, shap_target, shap_out = "shap.json";
    bool shap_full = false;
    shap_cmd->add_option("--function", shap_function, "additive function name");
    shap_cmd->add_option("--data", shap_data, "input CSV")->required();
    shap_cmd->add_option("--target", shap_target, "target column to exclude");
    shap_cmd->add_option("--out", shap_out, "output JSON path")->required();
    shap_cmd->add_flag("--full", shap_full, "include per-sample values");

    // report
    auto* report_cmd = app.add_subcommand("report", "combine artifacts into a report");
    std::string report_curves, report_classic, report_perm, report_shap;
    std::string report_out = "report.md";
    double report_flat_tol = 0.05, report_irrel_tol = 0.01;
    report_cmd->add_option("--curves", report_curves, "curves JSON")->required();
    report_cmd->add_option("--classic", report_classic, "classic JSON")->required();
    report_cmd->add_option("--perm", report_perm, "optional permutation JSON");
    report_cmd->add_option("--shap", report_shap, "optional shapley JSON");
    report_cmd->add_option("--flat-tol", report_flat_tol, "linear-like tolerance");
    report_cmd->add_option("--irrel-tol", report_irrel_tol, "irrelevance tolerance");
    report_cmd->add_option("--out", report_out, "markdown path (JSON twin written beside)")
        ->required();

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "oracle sweep against the closed forms");
    std::uint64_t verify_seed = 1;
    std::size_t verify_instances = 200, verify_restarts = 20, verify_iters = 400;
    verify_cmd->add_option("--seed", verify_seed, "rng seed");
    verify_cmd->add_option("--instances", verify_instances, "random instances");
    verify_cmd->add_option("--restarts", verify_restarts, "ascent restarts per case");
    verify_cmd->add_option("--iters", verify_iters, "ascent iterations per restart");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_n, synth_seed, synth_out);
        if (train_cmd->parsed()) {
            return cmd_train(train_data, train_target, train_hidden, train_activation,
                             train_epochs, train_batch, train_lr, train_optimizer, train_seed,
                             train_out);
        }
        if (jac_cmd->parsed()) return cmd_jacobian(jac_model, jac_data, jac_target, jac_out);
        if (curves_cmd->parsed()) {
            return cmd_curves(curves_jac, curves_alphas, curves_output, curves_flat_tol,
                              curves_irrel_tol, curves_out, curves_svg);
        }
        if (classic_cmd->parsed()) {
            return cmd_classic(classic_jac, classic_eps, classic_output, classic_out,
                               classic_svg);
        }
        if (perm_cmd->parsed()) {
            return cmd_permute(perm_model, perm_data, perm_target, perm_metric, perm_repeats,
                               perm_seed, perm_out);
        }
        if (shap_cmd->parsed()) {
            return cmd_shapley(shap_function, shap_data, shap_target, shap_out, shap_full);
        }
        if (report_cmd->parsed()) {
            return cmd_report(report_curves, report_classic, report_perm, report_shap,
                              report_flat_tol, report_irrel_tol, report_out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(verify_seed, verify_instances, verify_restarts, verify_iters);
        }
    } catch (const DivergedTrainingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
