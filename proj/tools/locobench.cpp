// Command-line driver: generate synthetic datasets, run method grids over
// them, and run the numerical verification suites. Results are JSON lines.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "loco/dataset_io.hpp"
#include "loco/experiment.hpp"
#include "loco/rng.hpp"
#include "loco/kernels.hpp"
#include "loco/solver.hpp"
#include "loco/theory.hpp"

namespace {

using nlohmann::json;

loco::SimSpec parse_sim_spec(const json& j) {
    loco::SimSpec spec;
    if (j.contains("preset")) {
        spec = loco::preset(j.at("preset").get<std::string>(), j.value("seed", std::uint64_t{0}));
        return spec;
    }
    spec.n = j.at("n").get<std::size_t>();
    spec.p = j.at("p").get<std::size_t>();
    spec.num_blocks = j.at("num_blocks").get<std::size_t>();
    if (j.at("sigma_r").is_array())
        spec.sigma_r = j.at("sigma_r").get<std::vector<double>>();
    else
        spec.sigma_r = {j.at("sigma_r").get<double>()};
    spec.snr = j.value("snr", 1.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.n_test = j.value("n_test", std::size_t{0});
    spec.allow_mean_reuse = j.value("allow_mean_reuse", false);
    return spec;
}

int cmd_generate(const std::string& spec_path, const std::string& out_base) {
    std::ifstream is(spec_path);
    if (!is) {
        std::cerr << "cannot read spec file: " << spec_path << "\n";
        return 1;
    }
    json j;
    is >> j;
    const loco::SimSpec spec = parse_sim_spec(j);
    const loco::SimulatedDataset ds = loco::generate(spec);
    loco::write_dataset(out_base, ds);
    std::cout << "wrote " << out_base << ".{train.bin,test.bin,json}"
              << "  n=" << spec.n << " p=" << spec.p << " R=" << spec.num_blocks << "\n";
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path, bool strict,
            bool parallel_grid, const std::string& csv_path) {
    std::ifstream is(config_path);
    if (!is) {
        std::cerr << "cannot read config file: " << config_path << "\n";
        return 1;
    }
    json j;
    is >> j;
    loco::ExperimentConfig cfg = loco::parse_experiment_config(j);
    if (parallel_grid) cfg.parallel_grid = true;
    if (cfg.threads == 0)
        if (const char* env = std::getenv("LOCO_THREADS")) cfg.threads = std::atoi(env);

    const auto records = loco::run_experiment(cfg);
    loco::write_jsonl(out_path, records);
    if (!csv_path.empty()) loco::write_csv(csv_path, records);

    std::size_t failed = 0;
    for (const auto& r : records)
        if (r.failed) ++failed;
    std::cout << records.size() << " records -> " << out_path;
    if (failed > 0) std::cout << "  (" << failed << " failed)";
    std::cout << "\n";
    return (strict && failed > 0) ? 1 : 0;
}

json solver_checks() {
    using namespace loco;
    json out = json::array();
    // SDCA vs closed form on random problems
    {
        std::size_t pass = 0;
        const std::size_t total = 20;
        double worst = 0.0;
        for (std::uint64_t s = 0; s < total; ++s) {
            Rng rng(9000 + s);
            DenseMatrix x(50, 30);
            for (double& v : x.data) v = rng.normal();
            Vector w(30);
            for (double& v : w) v = rng.normal();
            Vector y = matvec(x, w);
            for (double& v : y) v += 0.5 * rng.normal();
            const double lambda = (s % 3 == 0) ? 0.01 : (s % 3 == 1 ? 0.1 : 1.0);
            const Vector exact = ridge_closed_form({x, y, lambda});
            const auto [beta, diag] = ridge_sdca({x, y, lambda}, 1e-10, 20000, s);
            const double rel = norm2(sub(beta, exact)) / norm2(exact);
            worst = std::max(worst, rel);
            if (rel < 1e-5) ++pass;
        }
        out.push_back({{"check", "sdca_matches_closed_form"},
                       {"pass", pass == total},
                       {"passed", pass},
                       {"total", total},
                       {"worst_rel_err", worst}});
    }
    // residual identity vs direct OLS coordinates
    {
        std::size_t pass = 0;
        const std::size_t total = 20;
        for (std::uint64_t s = 0; s < total; ++s) {
            Rng rng(9100 + s);
            DenseMatrix x(40, 10);
            for (double& v : x.data) v = rng.normal();
            Vector y(40);
            for (double& v : y) v = rng.normal();
            const Vector ols = ols_min_norm(x, y);
            const std::size_t j = s % 10;
            const double cj = residual_coefficient(x, y, j);
            if (std::abs(cj - ols[j]) <= 1e-8 * std::max(1.0, std::abs(ols[j]))) ++pass;
        }
        out.push_back({{"check", "residual_coefficient_identity"},
                       {"pass", pass == total},
                       {"passed", pass},
                       {"total", total}});
    }
    return out;
}

json theory_checks() {
    using namespace loco;
    using namespace loco::theory;
    json out = json::array();

    // compressed least squares equality, Gaussian and sparse
    {
        Rng rng(9200);
        DenseMatrix x(100, 30);
        for (double& v : x.data) v = rng.normal();
        Vector beta(30);
        for (double& v : beta) v = rng.normal();
        for (auto [law, name] : {std::pair{CompressionLaw::Gaussian, "gaussian"},
                                 std::pair{CompressionLaw::Sparse, "sparse"}}) {
            const auto res = compressive_ls_check(x, beta, 10, law, 20000, 11);
            const double rel = std::abs(res.lhs - res.rhs) / res.rhs;
            out.push_back({{"check", std::string("compressive_ls_") + name},
                           {"pass", rel < 0.05},
                           {"lhs", res.lhs},
                           {"rhs", res.rhs},
                           {"rel_err", rel}});
        }
    }
    // concatenated row sampling vs the Chernoff bound
    {
        const DenseMatrix w = hadamard_columns(256, 8);
        const auto res = row_sampling_check(w, 4, 32, 0.5, 0.5, 200, 13);
        const double guaranteed = std::max(0.0, 1.0 - res.chernoff_failure_bound);
        out.push_back({{"check", "row_sampling_chernoff"},
                       {"pass", res.pass_fraction >= guaranteed},
                       {"pass_fraction", res.pass_fraction},
                       {"failure_bound", res.chernoff_failure_bound}});
    }
    // spectral sandwich with measured distortion + distortion scaling
    {
        const FixedDesignModel model = make_low_rank_model(100, 256, 10, 1.0, 17);
        const ThinSvd svd = thin_svd(model.x);
        const FeaturePartition part = partition_features(256, 4, 19);
        std::size_t pass = 0;
        std::vector<double> rho16, rho32;
        for (std::uint64_t s = 0; s < 30; ++s) {
            auto specs = [&](std::size_t tsubs) {
                std::vector<ProjectionSpec> v(4);
                for (std::size_t wk = 0; wk < 4; ++wk)
                    v[wk] = {ProjectionKind::Sparse, part.blocks[wk].size(), tsubs, 100 * s + wk};
                return v;
            };
            const auto s32 = specs(32);
            const double rho = empirical_rho(svd, part, s32, 0);
            rho32.push_back(rho);
            rho16.push_back(empirical_rho(svd, part, specs(16), 0));
            if (spectral_sandwich_check(model.x, local_design_matrix(model.x, part, s32, 0), rho))
                ++pass;
        }
        std::sort(rho16.begin(), rho16.end());
        std::sort(rho32.begin(), rho32.end());
        const double factor = rho16[rho16.size() / 2] / rho32[rho32.size() / 2];
        out.push_back({{"check", "spectral_sandwich_measured"},
                       {"pass", pass == 30},
                       {"passed", pass},
                       {"total", 30}});
        out.push_back({{"check", "distortion_scaling"},
                       {"pass", factor >= 1.2 && factor <= 1.7},
                       {"median_rho_16", rho16[rho16.size() / 2]},
                       {"median_rho_32", rho32[rho32.size() / 2]},
                       {"factor", factor}});
    }
    // coefficient error bound at C = 1
    {
        const FixedDesignModel model = make_low_rank_model(120, 1024, 10, 1.0, 23);
        LocoConfig cfg;
        cfg.num_workers = 2;
        cfg.tau_subs = 512;
        cfg.lambda = 0.5;
        std::size_t held = 0, usable = 0;
        for (std::uint64_t s = 1; s <= 10; ++s) {
            cfg.seed = s;
            const BoundReport rep = coefficient_bound_report(model, cfg, 1.0, 0.05, 10, 50);
            if (rep.vacuous) continue;
            ++usable;
            if (rep.holds) ++held;
        }
        out.push_back({{"check", "coefficient_error_bound"},
                       {"pass", usable > 0 && held == usable},
                       {"held", held},
                       {"usable", usable}});
    }
    return out;
}

int cmd_check(const std::string& suite, const std::string& out_path) {
    json records = json::array();
    if (suite == "solvers" || suite == "all")
        for (auto& r : solver_checks()) records.push_back(r);
    if (suite == "theory" || suite == "all")
        for (auto& r : theory_checks()) records.push_back(r);

    std::ofstream os(out_path);
    if (!os) {
        std::cerr << "cannot write: " << out_path << "\n";
        return 1;
    }
    bool all_pass = true;
    for (const auto& r : records) {
        os << r.dump() << "\n";
        const bool pass = r.at("pass").get<bool>();
        all_pass = all_pass && pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << r.at("check").get<std::string>() << "\n";
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature-distributed ridge regression benchmark driver"};
    app.require_subcommand(1);

    std::string spec_path, out_path, config_path, csv_path, suite = "all";
    bool strict = false, parallel_grid = false;

    auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
    gen->add_option("--spec", spec_path, "JSON generator spec (or {\"preset\": name})")
        ->required();
    gen->add_option("--out", out_path, "output base path")->required();

    auto* run = app.add_subcommand("run", "run a method grid and write JSON-lines records");
    run->add_option("--config", config_path, "experiment config JSON")->required();
    run->add_option("--out", out_path, "output JSONL path")->required();
    run->add_option("--csv", csv_path, "also write a CSV export");
    run->add_flag("--strict", strict, "exit nonzero if any record failed");
    run->add_flag("--parallel-grid", parallel_grid,
                  "run grid points concurrently (degrades timing fidelity)");

    auto* check = app.add_subcommand("check", "run the numerical verification suites");
    check->add_option("--suite", suite, "theory | solvers | all")
        ->check(CLI::IsMember({"theory", "solvers", "all"}));
    check->add_option("--out", out_path, "output JSONL path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(spec_path, out_path);
        if (run->parsed()) return cmd_run(config_path, out_path, strict, parallel_grid, csv_path);
        if (check->parsed()) return cmd_check(suite, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
