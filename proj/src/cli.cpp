#include "crcg/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crcg/jsonl.hpp"
#include "crcg/nn.hpp"
#include "crcg/stats.hpp"

namespace crcg {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream sink(path, std::ios::binary | std::ios::trunc);
    if (!sink) throw std::runtime_error("cannot open for writing: " + path);
    sink << content;
    if (!sink) throw std::runtime_error("write failed: " + path);
}

std::string artifact(const Config& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

std::string model_name(TrainMethod method, int seed) {
    return "model_" + std::string(method_slug(method)) + "_seed" + std::to_string(seed) + ".json";
}

std::string epochs_name(TrainMethod method, int seed) {
    return "epochs_" + std::string(method_slug(method)) + "_seed" + std::to_string(seed) + ".csv";
}

std::string result_name(TrainMethod method, int seed) {
    return "result_" + std::string(method_slug(method)) + "_seed" + std::to_string(seed) + ".json";
}

Dataset load_dataset(const std::string& path, const char* produced_by) {
    if (!fs::exists(path)) {
        throw std::runtime_error("missing artifact: " + path + " (run " + produced_by + " first)");
    }
    return jsonl::deserialize_file(path);
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) throw std::runtime_error("field " + field + ": expected matrix rows");
    const auto cols = v[0].is_array() ? v[0].size() : 0;
    if (cols == 0) throw std::runtime_error("field " + field + ": expected non-empty rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < v.size(); ++r) {
        if (!v[r].is_array() || v[r].size() != cols) {
            throw std::runtime_error("field " + field + ": ragged matrix");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!v[r][c].is_number()) throw std::runtime_error("field " + field + ": expected number");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r][c].get<double>();
        }
    }
    return m;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* name : allowed) known = known || key == name;
        if (!known) throw std::runtime_error(where + ": unknown key: " + key);
    }
    for (const char* name : allowed) {
        if (!obj.contains(name)) throw std::runtime_error(where + ": missing key \"" + name + "\"");
    }
}

void save_model(const std::string& path, const std::string& scenario, TrainMethod method, int seed,
                int num_classes, const ModelParams& params, double cpu_seconds) {
    ordered_json j;
    j["method"] = std::string(to_string(method));
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["num_classes"] = num_classes;
    j["train_cpu_seconds"] = cpu_seconds;
    json layers = json::array();
    for (const auto& w : params.layers) layers.push_back(matrix_to_json(w));
    j["layers"] = std::move(layers);
    j["cls_w"] = matrix_to_json(params.cls_w);
    j["cls_b"] = matrix_to_json(params.cls_b);
    write_text_file(path, j.dump(2) + "\n");
}

struct LoadedModel {
    ModelParams params;
    std::string method;
    std::string scenario;
    int seed = 0;
    double train_cpu_seconds = 0.0;
};

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("model parse error in " + path + ": " + e.what());
    }
    check_keys(j, {"method", "scenario", "seed", "num_classes", "train_cpu_seconds", "layers",
                   "cls_w", "cls_b"}, path);
    LoadedModel m;
    m.method = j["method"].get<std::string>();
    m.scenario = j["scenario"].get<std::string>();
    m.seed = j["seed"].get<int>();
    m.train_cpu_seconds = j["train_cpu_seconds"].get<double>();
    if (!j["layers"].is_array()) throw std::runtime_error("field layers: expected array");
    for (std::size_t l = 0; l < j["layers"].size(); ++l) {
        m.params.layers.push_back(matrix_from_json(j["layers"][l], "layers[" + std::to_string(l) + "]"));
    }
    m.params.cls_w = matrix_from_json(j["cls_w"], "cls_w");
    m.params.cls_b = matrix_from_json(j["cls_b"], "cls_b");
    return m;
}

void save_result(const std::string& path, const RunResult& r) {
    ordered_json j;
    j["method"] = r.method;
    j["scenario"] = r.scenario;
    j["seed"] = r.seed;
    j["accuracy"] = r.accuracy;
    j["cpu_seconds"] = r.cpu_seconds;
    write_text_file(path, j.dump(2) + "\n");
}

RunResult load_result(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open result: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("result parse error in " + path + ": " + e.what());
    }
    check_keys(j, {"method", "scenario", "seed", "accuracy", "cpu_seconds"}, path);
    RunResult r;
    r.method = j["method"].get<std::string>();
    r.scenario = j["scenario"].get<std::string>();
    r.seed = j["seed"].get<int>();
    r.accuracy = j["accuracy"].get<double>();
    r.cpu_seconds = j["cpu_seconds"].get<double>();
    return r;
}

int generation_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

int cmd_generate(const Config& cfg) {
    const auto [train_ds, test_ds] = generate_scenario(cfg.scenario, cfg.master_seed, generation_threads());
    jsonl::serialize_to_file(train_ds, artifact(cfg, "train.jsonl"));
    jsonl::serialize_to_file(test_ds, artifact(cfg, "test.jsonl"));
    std::cout << "wrote " << artifact(cfg, "train.jsonl") << " (" << train_ds.graphs.size()
              << " graphs)\n";
    std::cout << "wrote " << artifact(cfg, "test.jsonl") << " (" << test_ds.graphs.size()
              << " graphs)\n";
    return 0;
}

int cmd_train(const Config& cfg) {
    const Dataset data = load_dataset(artifact(cfg, "train.jsonl"), "generate");
    const std::string scenario = cfg.scenario.name();
    for (int seed : cfg.seeds) {
        TrainConfig tc = cfg.train;
        tc.seed = static_cast<std::uint64_t>(seed);
        const TrainResult r = train(data, tc);
        save_model(artifact(cfg, model_name(tc.method, seed)), scenario, tc.method, seed,
                   data.num_classes, r.params, r.cpu_seconds);
        write_epoch_csv(artifact(cfg, epochs_name(tc.method, seed)), r.log);
        std::cout << "trained " << to_string(tc.method) << " seed " << seed << ": train_acc="
                  << (r.log.empty() ? 0.0 : r.log.back().train_acc) << " cpu=" << r.cpu_seconds
                  << "s\n";
    }
    return 0;
}

int cmd_eval(const Config& cfg) {
    const Dataset test = load_dataset(artifact(cfg, "test.jsonl"), "generate");
    for (int seed : cfg.seeds) {
        const std::string path = artifact(cfg, model_name(cfg.train.method, seed));
        if (!fs::exists(path)) {
            throw std::runtime_error("missing artifact: " + path + " (run train first)");
        }
        const LoadedModel m = load_model(path);
        RunResult r;
        r.method = m.method;
        r.scenario = m.scenario;
        r.seed = seed;
        r.accuracy = evaluate(test, m.params);
        r.cpu_seconds = m.train_cpu_seconds;
        save_result(artifact(cfg, result_name(cfg.train.method, seed)), r);
        std::cout << "evaluated " << m.method << " seed " << seed << ": accuracy=" << r.accuracy
                  << "\n";
    }
    return 0;
}

void append_stat_row(std::string& csv, const std::string& method, double tau,
                     const std::vector<double>& accs) {
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= static_cast<double>(accs.size());
    double std_dev = 0.0;
    if (accs.size() > 1) {
        for (double a : accs) std_dev += (a - mean) * (a - mean);
        std_dev = std::sqrt(std_dev / static_cast<double>(accs.size() - 1));
    }
    csv += method;
    csv += ',';
    jsonl::append_double(csv, tau);
    csv += ',';
    jsonl::append_double(csv, mean);
    csv += ',';
    jsonl::append_double(csv, std_dev);
    csv += '\n';
}

int cmd_sweep_tau(const Config& cfg) {
    const Dataset train_ds = load_dataset(artifact(cfg, "train.jsonl"), "generate");
    const Dataset test_ds = load_dataset(artifact(cfg, "test.jsonl"), "generate");
    const std::vector<double> grid = {0.5, 0.6, 0.7, 0.8, 0.9};

    std::vector<double> erm_accs;
    for (int seed : cfg.seeds) {
        TrainConfig tc = cfg.train;
        tc.method = TrainMethod::Erm;
        tc.seed = static_cast<std::uint64_t>(seed);
        erm_accs.push_back(evaluate(test_ds, train(train_ds, tc).params));
    }
    std::string csv = "method,tau,mean,std\n";
    // tau never enters ERM training; its rows repeat the same runs.
    for (double tau : grid) append_stat_row(csv, "erm", tau, erm_accs);

    for (double tau : grid) {
        std::vector<double> accs;
        for (int seed : cfg.seeds) {
            TrainConfig tc = cfg.train;
            tc.method = TrainMethod::ErmRcam;
            tc.rcam.tau = tau;
            tc.seed = static_cast<std::uint64_t>(seed);
            accs.push_back(evaluate(test_ds, train(train_ds, tc).params));
        }
        append_stat_row(csv, "erm+rcam", tau, accs);
        std::cout << "sweep tau=" << tau << " done\n";
    }
    write_text_file(artifact(cfg, "sweep_tau.csv"), csv);
    return 0;
}

int cmd_report(const Config& cfg) {
    std::vector<fs::path> paths;
    if (fs::exists(cfg.output_dir)) {
        for (const auto& entry : fs::recursive_directory_iterator(cfg.output_dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (name.rfind("result_", 0) == 0 && name.size() > 5 &&
                name.substr(name.size() - 5) == ".json") {
                paths.push_back(entry.path());
            }
        }
    }
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) {
        throw std::runtime_error("missing artifact: no result_*.json under " + cfg.output_dir +
                                 " (run eval first)");
    }
    std::vector<RunResult> results;
    results.reserve(paths.size());
    for (const auto& p : paths) results.push_back(load_result(p.string()));

    const ComparisonTable table = summarize(results, std::string(to_string(TrainMethod::Erm)));
    write_text_file(artifact(cfg, "report.csv"), comparison_csv(table));
    write_text_file(artifact(cfg, "report.txt"), comparison_text(table));
    std::cout << comparison_text(table);

    std::set<std::string> methods;
    std::map<std::pair<std::string, int>, std::map<std::string, double>> blocks;
    for (const auto& r : results) {
        methods.insert(r.method);
        blocks[{r.scenario, r.seed}][r.method] = r.accuracy;
    }
    std::vector<std::vector<double>> matrix(methods.size());
    for (const auto& [block, by_method] : blocks) {
        if (by_method.size() != methods.size()) continue;
        std::size_t j = 0;
        for (const auto& m : methods) matrix[j++].push_back(by_method.at(m));
    }
    if (methods.size() >= 2 && matrix[0].size() >= 2) {
        const FriedmanResult f = friedman(matrix);
        std::string csv = "statistic,degrees_of_freedom,p_value\n";
        jsonl::append_double(csv, f.statistic);
        csv += ',';
        csv += std::to_string(f.degrees_of_freedom);
        csv += ',';
        jsonl::append_double(csv, f.p_value);
        csv += '\n';
        write_text_file(artifact(cfg, "friedman.csv"), csv);
        std::cout << "friedman statistic=" << f.statistic << " df=" << f.degrees_of_freedom
                  << " p=" << f.p_value << "\n";
    } else {
        std::cout << "friedman skipped: needs 2+ methods over 2+ complete (scenario, seed) blocks\n";
    }
    return 0;
}

}  // namespace

Config apply_overrides(Config config, const CliOverrides& overrides) {
    if (overrides.seed) config.seeds = {*overrides.seed};
    if (overrides.method) config.train.method = train_method_from_string(*overrides.method);
    if (overrides.tau) {
        if (*overrides.tau <= -1.0 || *overrides.tau > 1.0) {
            throw std::runtime_error("--tau: expected a value in (-1, 1]");
        }
        config.train.rcam.tau = *overrides.tau;
    }
    if (overrides.out) config.output_dir = *overrides.out;
    return config;
}

int execute(const std::string& command, const Config& config) {
    fs::create_directories(config.output_dir);
    write_text_file(artifact(config, "config.resolved.json"), resolved_json(config));
    if (command == "generate") return cmd_generate(config);
    if (command == "train") return cmd_train(config);
    if (command == "eval") return cmd_eval(config);
    if (command == "sweep-tau") return cmd_sweep_tau(config);
    if (command == "report") return cmd_report(config);
    throw std::invalid_argument("unknown command: " + command);
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"laboratory for causal robustness of graph learners"};
    app.require_subcommand(1);

    std::string config_source = "{}";
    CliOverrides overrides;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"generate", "write train/test JSONL datasets for the configured scenario"},
        {"train", "train one model per seed on train.jsonl"},
        {"eval", "evaluate trained models on test.jsonl"},
        {"sweep-tau", "train and evaluate both methods over a tau grid"},
        {"report", "aggregate result files into comparison and Friedman tables"},
    };
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_source, "config file path or inline JSON");
        sub->add_option("--seed", overrides.seed, "single seed replacing the config seed list");
        sub->add_option("--method", overrides.method, "training method: erm | erm+rcam");
        sub->add_option("--tau", overrides.tau, "marking threshold override");
        sub->add_option("--out", overrides.out, "output directory override");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const Config config = apply_overrides(parse_config(config_source), overrides);
        return execute(app.get_subcommands().front()->get_name(), config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace crcg
