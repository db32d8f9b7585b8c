#include "loco/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include "loco/baselines.hpp"
#include "loco/dataset_io.hpp"
#include "loco/kernels.hpp"
#include "loco/linalg.hpp"
#include "loco/metrics.hpp"
#include "loco/rng.hpp"
#include "loco/solver.hpp"

namespace loco {

namespace {

nlohmann::json num_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

const char* merge_name(MergeMode m) {
    return m == MergeMode::Concatenate ? "concatenate" : "sum";
}
const char* projection_name(ProjectionKind k) {
    return k == ProjectionKind::Srht ? "srht" : "sparse";
}
const char* solver_name(SolverChoice s) {
    return s == SolverChoice::ClosedForm ? "closed_form" : "sdca";
}

MergeMode parse_merge(const std::string& s) {
    if (s == "concatenate") return MergeMode::Concatenate;
    if (s == "sum") return MergeMode::Sum;
    throw ConfigError("unknown merge mode: " + s);
}
ProjectionKind parse_projection(const std::string& s) {
    if (s == "srht") return ProjectionKind::Srht;
    if (s == "sparse") return ProjectionKind::Sparse;
    throw ConfigError("unknown projection kind: " + s);
}
SolverChoice parse_solver(const std::string& s) {
    if (s == "closed_form") return SolverChoice::ClosedForm;
    if (s == "sdca") return SolverChoice::Sdca;
    throw ConfigError("unknown solver: " + s);
}

}  // namespace

nlohmann::json MetricsRecord::to_json() const {
    nlohmann::json j;
    j["method"] = method;
    j["params"] = params;
    if (aggregate) {
        j["aggregate"] = true;
        j["agg_stat"] = agg_stat;
    } else {
        j["seed"] = seed;
    }
    j["train_nmse"] = num_or_null(train_nmse);
    j["test_nmse"] = num_or_null(test_nmse);
    j["coef_rel_mse_true"] = num_or_null(coef_rel_mse_true);
    j["coef_pearson_true"] = num_or_null(coef_pearson_true);
    j["coef_rel_mse_ridge"] = num_or_null(coef_rel_mse_ridge);
    j["coef_pearson_ridge"] = num_or_null(coef_pearson_ridge);
    j["local_dim"] = num_or_null(local_dim);
    if (!std::isnan(speedup)) j["speedup"] = speedup;
    j["times"] = {{"project", times.project},
                  {"exchange", times.exchange},
                  {"solve", times.solve},
                  {"total", times.total}};
    if (failed) {
        j["failed"] = true;
        j["error"] = error;
    }
    return j;
}

nlohmann::json MetricsRecord::to_json_without_times() const {
    nlohmann::json j = to_json();
    j.erase("times");
    j.erase("speedup");
    return j;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    const auto& ds = j.at("dataset");
    if (ds.contains("preset")) {
        cfg.dataset.kind = DatasetSource::Kind::Preset;
        cfg.dataset.preset_name = ds.at("preset").get<std::string>();
    } else if (ds.contains("file")) {
        cfg.dataset.kind = DatasetSource::Kind::File;
        cfg.dataset.file = ds.at("file").get<std::string>();
    } else if (ds.contains("sim")) {
        cfg.dataset.kind = DatasetSource::Kind::Inline;
        const auto& s = ds.at("sim");
        cfg.dataset.sim.n = s.at("n").get<std::size_t>();
        cfg.dataset.sim.p = s.at("p").get<std::size_t>();
        cfg.dataset.sim.num_blocks = s.at("num_blocks").get<std::size_t>();
        if (s.at("sigma_r").is_array())
            cfg.dataset.sim.sigma_r = s.at("sigma_r").get<std::vector<double>>();
        else
            cfg.dataset.sim.sigma_r = {s.at("sigma_r").get<double>()};
        cfg.dataset.sim.snr = s.value("snr", 1.0);
        cfg.dataset.sim.n_test = s.value("n_test", std::size_t{0});
        cfg.dataset.sim.allow_mean_reuse = s.value("allow_mean_reuse", false);
    } else {
        throw ConfigError("dataset must specify one of: preset, file, sim");
    }

    if (j.contains("lambda")) {
        const auto& lam = j.at("lambda");
        if (lam.is_array())
            cfg.lambda_grid = lam.get<std::vector<double>>();
        else if (lam.is_object()) {
            cfg.lambda_grid = lam.at("grid").get<std::vector<double>>();
            cfg.cv_folds = lam.value("cv", std::size_t{0});
        } else {
            cfg.lambda_grid = {lam.get<double>()};
        }
    }
    if (cfg.lambda_grid.empty()) throw ConfigError("lambda grid must be non-empty");

    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) throw ConfigError("seeds must be non-empty");
    cfg.threads = j.value("threads", 0);
    cfg.parallel_grid = j.value("parallel_grid", false);

    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
        throw ConfigError("at least one method is required");
    for (const auto& m : j.at("methods")) {
        MethodSpec spec;
        spec.type = m.at("type").get<std::string>();
        if (spec.type == "loco") {
            if (m.contains("K")) {
                if (m.at("K").is_array())
                    spec.loco.k_values = m.at("K").get<std::vector<std::size_t>>();
                else
                    spec.loco.k_values = {m.at("K").get<std::size_t>()};
            }
            if (m.contains("ratio")) {
                if (m.at("ratio").is_array())
                    spec.loco.ratios = m.at("ratio").get<std::vector<double>>();
                else
                    spec.loco.ratios = {m.at("ratio").get<double>()};
            }
            if (m.contains("tau_subs")) {
                if (m.at("tau_subs").is_array())
                    spec.loco.tau_subs_values = m.at("tau_subs").get<std::vector<std::size_t>>();
                else
                    spec.loco.tau_subs_values = {m.at("tau_subs").get<std::size_t>()};
            }
            if (spec.loco.ratios.empty() && spec.loco.tau_subs_values.empty())
                throw ConfigError("loco method needs ratio or tau_subs");
            spec.loco.merge = parse_merge(m.value("merge", "concatenate"));
            spec.loco.projection = parse_projection(m.value("projection", "srht"));
            spec.loco.solver = parse_solver(m.value("solver", "closed_form"));
            spec.loco.sdca.gap_tol = m.value("sdca_gap_tol", 1e-8);
            spec.loco.sdca.max_epochs = m.value("sdca_max_epochs", std::size_t{100});
        } else if (spec.type == "column_compression") {
            spec.tau_subs = m.value("tau_subs", std::size_t{0});
            spec.tau_subs_ratio = m.value("tau_subs_ratio", 0.0);
            spec.projection = parse_projection(m.value("projection", "sparse"));
            if (spec.tau_subs == 0 && spec.tau_subs_ratio <= 0.0)
                throw ConfigError("column_compression needs tau_subs or tau_subs_ratio");
        } else if (spec.type == "row_compression") {
            spec.n_subs = m.value("n_subs", std::size_t{0});
            spec.n_subs_ratio = m.value("n_subs_ratio", 0.0);
            spec.projection = parse_projection(m.value("projection", "sparse"));
            if (spec.n_subs == 0 && spec.n_subs_ratio <= 0.0)
                throw ConfigError("row_compression needs n_subs or n_subs_ratio");
        } else if (spec.type != "full_ridge" && spec.type != "diagonal") {
            throw ConfigError("unknown method type: " + spec.type);
        }
        cfg.methods.push_back(spec);
    }
    return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    switch (cfg.dataset.kind) {
        case DatasetSource::Kind::Preset:
            j["dataset"] = {{"preset", cfg.dataset.preset_name}};
            break;
        case DatasetSource::Kind::File:
            j["dataset"] = {{"file", cfg.dataset.file}};
            break;
        case DatasetSource::Kind::Inline:
            j["dataset"] = {{"sim",
                             {{"n", cfg.dataset.sim.n},
                              {"p", cfg.dataset.sim.p},
                              {"num_blocks", cfg.dataset.sim.num_blocks},
                              {"sigma_r", cfg.dataset.sim.sigma_r},
                              {"snr", cfg.dataset.sim.snr},
                              {"n_test", cfg.dataset.sim.n_test},
                              {"allow_mean_reuse", cfg.dataset.sim.allow_mean_reuse}}}};
            break;
    }
    if (cfg.cv_folds > 0)
        j["lambda"] = {{"grid", cfg.lambda_grid}, {"cv", cfg.cv_folds}};
    else
        j["lambda"] = cfg.lambda_grid;
    j["seeds"] = cfg.seeds;
    j["threads"] = cfg.threads;
    j["parallel_grid"] = cfg.parallel_grid;
    j["methods"] = nlohmann::json::array();
    for (const auto& m : cfg.methods) {
        nlohmann::json mj{{"type", m.type}};
        if (m.type == "loco") {
            mj["K"] = m.loco.k_values;
            if (!m.loco.ratios.empty()) mj["ratio"] = m.loco.ratios;
            if (!m.loco.tau_subs_values.empty()) mj["tau_subs"] = m.loco.tau_subs_values;
            mj["merge"] = merge_name(m.loco.merge);
            mj["projection"] = projection_name(m.loco.projection);
            mj["solver"] = solver_name(m.loco.solver);
        } else if (m.type == "column_compression") {
            if (m.tau_subs > 0) mj["tau_subs"] = m.tau_subs;
            if (m.tau_subs_ratio > 0) mj["tau_subs_ratio"] = m.tau_subs_ratio;
            mj["projection"] = projection_name(m.projection);
        } else if (m.type == "row_compression") {
            if (m.n_subs > 0) mj["n_subs"] = m.n_subs;
            if (m.n_subs_ratio > 0) mj["n_subs_ratio"] = m.n_subs_ratio;
            mj["projection"] = projection_name(m.projection);
        }
        j["methods"].push_back(mj);
    }
    return j;
}

namespace {

struct PreparedData {
    DenseMatrix x_train;  // standardized
    DenseMatrix x_test;   // train statistics applied
    Vector y_train;       // centered by the train mean
    Vector y_test;
    Vector beta_star;  // original scale; empty when unknown
    Vector sds;        // per-column scale, for mapping coefficients back
    bool has_test = false;
};

PreparedData prepare(const DatasetSource& src, std::uint64_t seed) {
    SimulatedDataset ds;
    switch (src.kind) {
        case DatasetSource::Kind::Preset: ds = generate(preset(src.preset_name, seed)); break;
        case DatasetSource::Kind::File: ds = load_dataset(src.file); break;
        case DatasetSource::Kind::Inline: {
            SimSpec spec = src.sim;
            spec.seed = seed;
            ds = generate(spec);
            break;
        }
    }
    PreparedData out;
    const StandardizeResult st = standardize_columns(ds.x_train);
    out.x_train = st.matrix;
    out.sds = st.sds;
    out.has_test = ds.x_test.rows > 1;
    if (out.has_test) out.x_test = apply_standardization(ds.x_test, st.means, st.sds);
    const double y_mean = mean(ds.y_train);
    out.y_train = ds.y_train;
    for (double& v : out.y_train) v -= y_mean;
    if (out.has_test) {
        out.y_test = ds.y_test;
        for (double& v : out.y_test) v -= y_mean;
    }
    out.beta_star = ds.beta_star;
    return out;
}

// coefficients in the standardized space -> original feature scale
Vector to_original_scale(const Vector& beta_std, const Vector& sds) {
    Vector out(beta_std.size());
    for (std::size_t j = 0; j < beta_std.size(); ++j)
        out[j] = sds[j] > 0.0 ? beta_std[j] / sds[j] : 0.0;
    return out;
}

struct FitOutput {
    Vector beta_std;
    PhaseTimes times;
    double local_dim = std::numeric_limits<double>::quiet_NaN();
};

void fill_metrics(MetricsRecord& rec, const PreparedData& data, const FitOutput& fit,
                  const Vector* beta_rr_orig) {
    const Vector pred_train = matvec(data.x_train, fit.beta_std);
    rec.train_nmse = normalized_mse(data.y_train, pred_train);
    if (data.has_test) {
        const Vector pred_test = matvec(data.x_test, fit.beta_std);
        rec.test_nmse = normalized_mse(data.y_test, pred_test);
    }
    const Vector beta_orig = to_original_scale(fit.beta_std, data.sds);
    if (!data.beta_star.empty()) {
        const CoefficientMetrics m = coefficient_metrics(beta_orig, data.beta_star);
        rec.coef_rel_mse_true = m.rel_mse;
        rec.coef_pearson_true = m.pearson;
    }
    if (beta_rr_orig) {
        const CoefficientMetrics m = coefficient_metrics(beta_orig, *beta_rr_orig);
        rec.coef_rel_mse_ridge = m.rel_mse;
        rec.coef_pearson_ridge = m.pearson;
    }
    rec.local_dim = fit.local_dim;
    rec.times = fit.times;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

struct WorkItem {
    MethodSpec method;
    nlohmann::json params;
    std::uint64_t seed = 0;
    double lambda = 0.0;
    // loco point
    LocoConfig loco;
    bool is_loco = false;
};

FitOutput run_item(const WorkItem& item, const PreparedData& data) {
    FitOutput out;
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if (item.is_loco) {
        const FitResult fit = loco_fit(data.x_train, data.y_train, item.loco);
        out.beta_std = fit.beta;
        for (const auto& w : fit.workers) {
            out.times.project = std::max(out.times.project, w.project_seconds);
            out.times.exchange = std::max(out.times.exchange, w.merge_seconds);
            out.times.solve = std::max(out.times.solve, w.solve_seconds);
        }
        out.times.total = fit.total_seconds;
        out.local_dim = static_cast<double>(local_dimension(item.loco, data.x_train.cols));
        return out;
    }
    if (item.method.type == "full_ridge") {
        out.beta_std = ridge_closed_form({data.x_train, data.y_train, item.lambda});
    } else if (item.method.type == "diagonal") {
        out.beta_std = diagonal_approx(data.x_train, data.y_train);
    } else if (item.method.type == "column_compression") {
        std::size_t t = item.method.tau_subs;
        if (t == 0)
            t = std::max<std::size_t>(
                1, static_cast<std::size_t>(item.method.tau_subs_ratio *
                                            static_cast<double>(data.x_train.cols)));
        out.beta_std = column_compression(data.x_train, data.y_train, item.lambda, t,
                                          Rng::keyed(item.seed, 0xc01).next_u64(),
                                          item.method.projection);
    } else if (item.method.type == "row_compression") {
        std::size_t t = item.method.n_subs;
        if (t == 0)
            t = std::max<std::size_t>(
                1, static_cast<std::size_t>(item.method.n_subs_ratio *
                                            static_cast<double>(data.x_train.rows)));
        out.beta_std = row_compression(data.x_train, data.y_train, item.lambda, t,
                                       Rng::keyed(item.seed, 0x20c).next_u64(),
                                       item.method.projection);
    } else {
        throw ConfigError("unknown method type: " + item.method.type);
    }
    out.times.solve = elapsed();
    out.times.total = out.times.solve;
    return out;
}

// k-fold CV over the lambda grid; fold split and treatment identical for
// every method. Returns the grid value minimizing mean held-out nmse.
double select_lambda_cv(const ExperimentConfig& cfg, const WorkItem& proto,
                        const SimulatedDataset& raw, std::uint64_t seed) {
    std::vector<std::size_t> idx(raw.x_train.rows);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng = Rng::keyed(seed, 0xcf01d);
    rng.shuffle(idx);
    const std::size_t folds = cfg.cv_folds;

    double best_lambda = cfg.lambda_grid.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (double lambda : cfg.lambda_grid) {
        double score = 0.0;
        std::size_t used = 0;
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<std::size_t> train_rows, test_rows;
            for (std::size_t i = 0; i < idx.size(); ++i)
                (i % folds == f ? test_rows : train_rows).push_back(idx[i]);
            if (test_rows.size() < 2 || train_rows.size() < 2) continue;
            DenseMatrix xtr(train_rows.size(), raw.x_train.cols);
            DenseMatrix xte(test_rows.size(), raw.x_train.cols);
            for (std::size_t j = 0; j < raw.x_train.cols; ++j) {
                for (std::size_t i = 0; i < train_rows.size(); ++i)
                    xtr(i, j) = raw.x_train(train_rows[i], j);
                for (std::size_t i = 0; i < test_rows.size(); ++i)
                    xte(i, j) = raw.x_train(test_rows[i], j);
            }
            Vector ytr(train_rows.size()), yte(test_rows.size());
            for (std::size_t i = 0; i < train_rows.size(); ++i) ytr[i] = raw.y_train[train_rows[i]];
            for (std::size_t i = 0; i < test_rows.size(); ++i) yte[i] = raw.y_train[test_rows[i]];

            const StandardizeResult st = standardize_columns(xtr);
            const DenseMatrix xte_s = apply_standardization(xte, st.means, st.sds);
            const double mu = mean(ytr);
            for (double& v : ytr) v -= mu;
            for (double& v : yte) v -= mu;

            PreparedData fold;
            fold.x_train = st.matrix;
            fold.x_test = xte_s;
            fold.y_train = ytr;
            fold.y_test = yte;
            fold.sds = st.sds;
            fold.has_test = true;

            WorkItem item = proto;
            item.lambda = lambda;
            if (item.is_loco) item.loco.lambda = lambda;
            try {
                const FitOutput fit = run_item(item, fold);
                const Vector pred = matvec(fold.x_test, fit.beta_std);
                score += normalized_mse(fold.y_test, pred);
                ++used;
            } catch (const Error&) {
                score += std::numeric_limits<double>::infinity();
                ++used;
            }
        }
        if (used == 0) continue;
        score /= static_cast<double>(used);
        if (score < best_score) {
            best_score = score;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

}  // namespace

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg) {
    std::vector<MetricsRecord> records;

    for (std::uint64_t seed : cfg.seeds) {
        const PreparedData data = prepare(cfg.dataset, seed);
        SimulatedDataset raw_for_cv;  // only loaded when CV is requested
        if (cfg.cv_folds > 0) {
            switch (cfg.dataset.kind) {
                case DatasetSource::Kind::Preset:
                    raw_for_cv = generate(preset(cfg.dataset.preset_name, seed));
                    break;
                case DatasetSource::Kind::File: raw_for_cv = load_dataset(cfg.dataset.file); break;
                case DatasetSource::Kind::Inline: {
                    SimSpec spec = cfg.dataset.sim;
                    spec.seed = seed;
                    raw_for_cv = generate(spec);
                    break;
                }
            }
        }

        // full-ridge reference per lambda, shared by every method's
        // coefficient comparison; computed up front so the grid loop can run
        // concurrently
        std::map<double, Vector> ridge_orig;
        bool needs_reference = false;
        for (const auto& m : cfg.methods)
            if (m.type != "full_ridge") needs_reference = true;
        if (needs_reference)
            for (double lambda : cfg.lambda_grid) {
                const Vector b = ridge_closed_form({data.x_train, data.y_train, lambda});
                ridge_orig.emplace(lambda, to_original_scale(b, data.sds));
            }
        auto ridge_reference = [&](double lambda) -> const Vector* {
            const auto it = ridge_orig.find(lambda);
            return it == ridge_orig.end() ? nullptr : &it->second;
        };

        // expand the grid into work items
        std::vector<WorkItem> items;
        for (const auto& method : cfg.methods) {
            std::vector<double> lambdas = cfg.lambda_grid;
            if (method.type == "diagonal") lambdas = {0.0};  // lambda-free estimator

            if (method.type == "loco") {
                std::vector<std::pair<double, std::size_t>> sizes;  // (ratio, tau_subs)
                for (double r : method.loco.ratios) sizes.emplace_back(r, 0);
                for (std::size_t t : method.loco.tau_subs_values) sizes.emplace_back(0.0, t);
                for (std::size_t k : method.loco.k_values)
                    for (auto [ratio, tsubs] : sizes)
                        for (double lambda : lambdas) {
                            WorkItem item;
                            item.method = method;
                            item.seed = seed;
                            item.lambda = lambda;
                            item.is_loco = true;
                            item.loco.num_workers = k;
                            item.loco.ratio = ratio;
                            item.loco.tau_subs = tsubs;
                            item.loco.lambda = lambda;
                            item.loco.merge = method.loco.merge;
                            item.loco.projection = method.loco.projection;
                            item.loco.solver = method.loco.solver;
                            item.loco.sdca = method.loco.sdca;
                            item.loco.seed = seed;
                            item.loco.threads = cfg.threads;
                            item.params = {{"K", k},
                                           {"lambda", lambda},
                                           {"merge", merge_name(method.loco.merge)},
                                           {"projection", projection_name(method.loco.projection)},
                                           {"solver", solver_name(method.loco.solver)}};
                            if (ratio > 0.0) item.params["ratio"] = ratio;
                            if (tsubs > 0) item.params["tau_subs"] = tsubs;
                            items.push_back(std::move(item));
                        }
            } else {
                for (double lambda : lambdas) {
                    WorkItem item;
                    item.method = method;
                    item.seed = seed;
                    item.lambda = lambda;
                    item.params = nlohmann::json::object();
                    if (method.type != "diagonal") item.params["lambda"] = lambda;
                    if (method.type == "column_compression") {
                        if (method.tau_subs > 0) item.params["tau_subs"] = method.tau_subs;
                        if (method.tau_subs_ratio > 0)
                            item.params["tau_subs_ratio"] = method.tau_subs_ratio;
                        item.params["projection"] = projection_name(method.projection);
                    }
                    if (method.type == "row_compression") {
                        if (method.n_subs > 0) item.params["n_subs"] = method.n_subs;
                        if (method.n_subs_ratio > 0) item.params["n_subs_ratio"] = method.n_subs_ratio;
                        item.params["projection"] = projection_name(method.projection);
                    }
                    items.push_back(std::move(item));
                }
            }
        }

        // optional CV: collapse the lambda dimension per method grid point
        if (cfg.cv_folds > 0) {
            std::vector<WorkItem> selected;
            std::map<std::string, double> chosen;  // key: params minus lambda
            for (auto& item : items) {
                nlohmann::json key_json = item.params;
                key_json.erase("lambda");
                key_json["method"] = item.method.type;
                const std::string key = key_json.dump();
                if (chosen.find(key) == chosen.end())
                    chosen[key] = select_lambda_cv(cfg, item, raw_for_cv, seed);
                if (item.lambda == chosen[key] ||
                    (item.method.type == "diagonal" && item.lambda == 0.0)) {
                    item.params["cv_selected"] = true;
                    selected.push_back(item);
                }
            }
            items = std::move(selected);
        }

        std::vector<MetricsRecord> seed_records(items.size());
        auto process = [&](std::size_t i) {
            const WorkItem& item = items[i];
            MetricsRecord rec;
            rec.method = item.method.type;
            rec.params = item.params;
            rec.seed = seed;
            try {
                const FitOutput fit = run_item(item, data);
                const Vector* ref =
                    item.method.type == "full_ridge" || item.method.type == "diagonal"
                        ? (item.method.type == "full_ridge" ? nullptr : ridge_reference(cfg.lambda_grid.front()))
                        : ridge_reference(item.lambda);
                fill_metrics(rec, data, fit, ref);
                if (item.is_loco)
                    rec.params["tau_subs_resolved"] =
                        resolve_tau_subs(item.loco, data.x_train.cols);
            } catch (const Error& e) {
                rec.failed = true;
                rec.error = e.what();
            }
            seed_records[i] = std::move(rec);
        };

        if (cfg.parallel_grid) {
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(items.size()); ++i)
                process(static_cast<std::size_t>(i));
        } else {
            for (std::size_t i = 0; i < items.size(); ++i) process(i);
        }
        for (auto& r : seed_records) records.push_back(std::move(r));
    }

    // aggregate rows: median and mean over seeds per (method, params)
    std::map<std::string, std::vector<const MetricsRecord*>> groups;
    for (const auto& r : records) {
        if (r.failed) continue;
        nlohmann::json key{{"method", r.method}, {"params", r.params}};
        groups[key.dump()].push_back(&r);
    }
    std::vector<MetricsRecord> aggregates;
    for (const auto& [key, rows] : groups) {
        for (const char* stat : {"median", "mean"}) {
            MetricsRecord agg;
            agg.method = rows.front()->method;
            agg.params = rows.front()->params;
            agg.aggregate = true;
            agg.agg_stat = stat;
            auto collect = [&](auto field) {
                std::vector<double> vals;
                for (const auto* r : rows)
                    if (!std::isnan(r->*field)) vals.push_back(r->*field);
                return vals;
            };
            const bool is_median = std::string(stat) == "median";
            auto reduce = [&](auto field) {
                const auto vals = collect(field);
                return is_median ? median_of(vals) : mean_of(vals);
            };
            agg.train_nmse = reduce(&MetricsRecord::train_nmse);
            agg.test_nmse = reduce(&MetricsRecord::test_nmse);
            agg.coef_rel_mse_true = reduce(&MetricsRecord::coef_rel_mse_true);
            agg.coef_pearson_true = reduce(&MetricsRecord::coef_pearson_true);
            agg.coef_rel_mse_ridge = reduce(&MetricsRecord::coef_rel_mse_ridge);
            agg.coef_pearson_ridge = reduce(&MetricsRecord::coef_pearson_ridge);
            agg.local_dim = reduce(&MetricsRecord::local_dim);
            std::vector<double> totals;
            for (const auto* r : rows) totals.push_back(r->times.total);
            agg.times.total = is_median ? median_of(totals) : mean_of(totals);
            aggregates.push_back(std::move(agg));
        }
    }

    // speedup column on loco median aggregates: wall time at the smallest K
    // over wall time at K, within a fixed (ratio/tau_subs, lambda, ...)
    if (!cfg.parallel_grid) {
        std::map<std::string, std::pair<std::size_t, double>> smallest;  // key -> (K, median total)
        auto strip_k = [](const MetricsRecord& r) {
            nlohmann::json key = r.params;
            key.erase("K");
            key.erase("tau_subs_resolved");
            key["method"] = r.method;
            return key.dump();
        };
        for (const auto& a : aggregates) {
            if (a.method != "loco" || a.agg_stat != "median") continue;
            const std::size_t k = a.params.at("K").get<std::size_t>();
            const std::string key = strip_k(a);
            auto it = smallest.find(key);
            if (it == smallest.end() || k < it->second.first) smallest[key] = {k, a.times.total};
        }
        for (auto& a : aggregates) {
            if (a.method != "loco" || a.agg_stat != "median") continue;
            const auto& base = smallest[strip_k(a)];
            if (a.times.total > 0.0) a.speedup = base.second / a.times.total;
        }
    }

    for (auto& a : aggregates) records.push_back(std::move(a));
    return records;
}

void write_jsonl(const std::string& path, const std::vector<MetricsRecord>& records) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    for (const auto& r : records) os << r.to_json().dump() << "\n";
    if (!os) throw IoError("write failed: " + path);
}

void write_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "method,params,seed,aggregate,agg_stat,train_nmse,test_nmse,coef_rel_mse_true,"
          "coef_pearson_true,coef_rel_mse_ridge,coef_pearson_ridge,local_dim,speedup,"
          "time_project,time_exchange,time_solve,time_total,failed\n";
    auto cell = [](double v) { return std::isnan(v) ? std::string() : std::to_string(v); };
    for (const auto& r : records) {
        // RFC 4180 quoting: double any embedded quotes inside the params cell
        std::string params;
        for (char c : r.params.dump()) {
            if (c == '"') params += "\"\"";
            else params += c;
        }
        os << r.method << ",\"" << params << "\"," << (r.aggregate ? "" : std::to_string(r.seed))
           << "," << (r.aggregate ? "1" : "0") << "," << r.agg_stat << "," << cell(r.train_nmse)
           << "," << cell(r.test_nmse) << "," << cell(r.coef_rel_mse_true) << ","
           << cell(r.coef_pearson_true) << "," << cell(r.coef_rel_mse_ridge) << ","
           << cell(r.coef_pearson_ridge) << "," << cell(r.local_dim) << "," << cell(r.speedup)
           << "," << cell(r.times.project) << "," << cell(r.times.exchange) << ","
           << cell(r.times.solve) << "," << cell(r.times.total) << "," << (r.failed ? "1" : "0")
           << "\n";
    }
}

}  // namespace loco
