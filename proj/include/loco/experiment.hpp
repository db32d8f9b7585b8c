#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loco/datagen.hpp"
#include "loco/engine.hpp"

namespace loco {

struct PhaseTimes {
    double project = 0.0;
    double exchange = 0.0;
    double solve = 0.0;
    double total = 0.0;
};

struct MetricsRecord {
    std::string method;
    nlohmann::json params;  // method-specific parameters, lambda included
    std::uint64_t seed = 0;
    bool aggregate = false;
    std::string agg_stat;  // "median" | "mean" on aggregate rows

    double train_nmse = std::numeric_limits<double>::quiet_NaN();
    double test_nmse = std::numeric_limits<double>::quiet_NaN();
    double coef_rel_mse_true = std::numeric_limits<double>::quiet_NaN();
    double coef_pearson_true = std::numeric_limits<double>::quiet_NaN();
    double coef_rel_mse_ridge = std::numeric_limits<double>::quiet_NaN();
    double coef_pearson_ridge = std::numeric_limits<double>::quiet_NaN();
    double local_dim = std::numeric_limits<double>::quiet_NaN();
    double speedup = std::numeric_limits<double>::quiet_NaN();
    PhaseTimes times;

    bool failed = false;
    std::string error;

    nlohmann::json to_json() const;
    /// Same as to_json() with the wall-time fields removed; used for
    /// determinism comparisons.
    nlohmann::json to_json_without_times() const;
};

struct DatasetSource {
    enum class Kind { Preset, File, Inline } kind = Kind::Preset;
    std::string preset_name = "scenario-one-desk";
    std::string file;
    SimSpec sim;
};

struct LocoMethodSpec {
    std::vector<std::size_t> k_values{2};
    std::vector<double> ratios;                 // each ratio is a grid point
    std::vector<std::size_t> tau_subs_values;   // alternative to ratios
    MergeMode merge = MergeMode::Concatenate;
    ProjectionKind projection = ProjectionKind::Srht;
    SolverChoice solver = SolverChoice::ClosedForm;
    SdcaParams sdca;
};

struct MethodSpec {
    std::string type;  // loco | full_ridge | diagonal | column_compression | row_compression
    LocoMethodSpec loco;
    std::size_t tau_subs = 0;      // column_compression
    double tau_subs_ratio = 0.0;   // fraction of p
    std::size_t n_subs = 0;        // row_compression
    double n_subs_ratio = 0.0;     // fraction of n
    ProjectionKind projection = ProjectionKind::Sparse;
};

struct ExperimentConfig {
    DatasetSource dataset;
    std::vector<double> lambda_grid{0.1};
    std::size_t cv_folds = 0;  // 0 = report every grid point; >0 = k-fold CV selects one
    std::vector<std::uint64_t> seeds{1};
    std::vector<MethodSpec> methods;
    int threads = 0;
    bool parallel_grid = false;  // trades timing fidelity for throughput
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg);

void write_jsonl(const std::string& path, const std::vector<MetricsRecord>& records);
void write_csv(const std::string& path, const std::vector<MetricsRecord>& records);

}  // namespace loco
