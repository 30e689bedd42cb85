#include "crcg/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace crcg {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* name : allowed) known = known || key == name;
        if (!known) throw std::runtime_error("unknown key: " + key);
    }
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const json& v, const std::string& field) {
    if (!v.is_string()) throw std::runtime_error("field " + field + ": expected string");
    return v.get<std::string>();
}

double get_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw std::runtime_error("field " + field + ": expected number");
    return v.get<double>();
}

int get_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw std::runtime_error("field " + field + ": expected integer");
    return v.get<int>();
}

std::uint64_t get_u64(const json& v, const std::string& field) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw std::runtime_error("field " + field + ": expected non-negative integer");
    }
    return v.get<std::uint64_t>();
}

void parse_scenario(const json& obj, ScenarioConfig& s) {
    if (!obj.is_object()) throw std::runtime_error("field scenario: expected object");
    check_keys(obj, {"variant", "noise_sets", "p", "multiplier", "std_level", "num_classes",
                     "n_train", "n_test", "noise_edge_frac", "noise_node_frac", "a_min", "a_max",
                     "f_map", "h_map", "feature_dim"});
    if (const json* v = find(obj, "variant")) s.variant = scenario_variant_from_string(get_string(*v, "scenario.variant"));
    if (const json* v = find(obj, "noise_sets")) s.noise_sets = get_int(*v, "scenario.noise_sets");
    if (const json* v = find(obj, "p")) s.p = get_number(*v, "scenario.p");
    if (const json* v = find(obj, "multiplier")) s.multiplier = get_int(*v, "scenario.multiplier");
    if (const json* v = find(obj, "std_level")) s.std_level = complexity_level_from_string(get_string(*v, "scenario.std_level"));
    if (const json* v = find(obj, "num_classes")) s.num_classes = get_int(*v, "scenario.num_classes");
    if (const json* v = find(obj, "n_train")) s.n_train = get_int(*v, "scenario.n_train");
    if (const json* v = find(obj, "n_test")) s.n_test = get_int(*v, "scenario.n_test");
    if (const json* v = find(obj, "noise_edge_frac")) s.noise_edge_frac = get_number(*v, "scenario.noise_edge_frac");
    if (const json* v = find(obj, "noise_node_frac")) s.noise_node_frac = get_number(*v, "scenario.noise_node_frac");
    if (const json* v = find(obj, "a_min")) s.a_min = get_int(*v, "scenario.a_min");
    if (const json* v = find(obj, "a_max")) s.a_max = get_int(*v, "scenario.a_max");
    if (const json* v = find(obj, "f_map")) s.f_map = param_map_from_string(get_string(*v, "scenario.f_map"));
    if (const json* v = find(obj, "h_map")) s.h_map = label_map_from_string(get_string(*v, "scenario.h_map"));
    if (const json* v = find(obj, "feature_dim")) s.feature_dim = get_int(*v, "scenario.feature_dim");

    if (s.p < 0.0 || s.p > 1.0) throw std::runtime_error("field scenario.p: expected a probability in [0, 1]");
    if (s.n_train < 1 || s.n_test < 1) throw std::runtime_error("field scenario.n_train/n_test: expected positive counts");
    if (s.a_min > s.a_max || s.a_min < 1) throw std::runtime_error("field scenario.a_min/a_max: expected 1 <= a_min <= a_max");
    if (s.feature_dim < 1) throw std::runtime_error("field scenario.feature_dim: expected a positive width");
    if (s.multiplier < 1) throw std::runtime_error("field scenario.multiplier: expected a positive multiplier");
    if (s.noise_sets < 1) throw std::runtime_error("field scenario.noise_sets: expected a positive count");
    if (s.noise_edge_frac < 0.0 || s.noise_edge_frac > 1.0 || s.noise_node_frac < 0.0 ||
        s.noise_node_frac > 1.0) {
        throw std::runtime_error("field scenario.noise_*_frac: expected a fraction in [0, 1]");
    }
}

void parse_rcam(const json& obj, RcamConfig& r) {
    if (!obj.is_object()) throw std::runtime_error("field train.rcam: expected object");
    check_keys(obj, {"tau", "lambda", "scope"});
    if (const json* v = find(obj, "tau")) r.tau = get_number(*v, "train.rcam.tau");
    if (const json* v = find(obj, "lambda")) r.lambda = get_number(*v, "train.rcam.lambda");
    if (const json* v = find(obj, "scope")) r.scope = rcam_scope_from_string(get_string(*v, "train.rcam.scope"));
    if (r.tau <= -1.0 || r.tau > 1.0) throw std::runtime_error("field train.rcam.tau: expected a value in (-1, 1]");
    if (r.lambda < 0.0) throw std::runtime_error("field train.rcam.lambda: expected a non-negative weight");
}

void parse_train(const json& obj, TrainConfig& t) {
    if (!obj.is_object()) throw std::runtime_error("field train: expected object");
    check_keys(obj, {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "eps", "seed",
                     "method", "rcam", "hidden_width", "layer_count"});
    if (const json* v = find(obj, "epochs")) t.epochs = get_int(*v, "train.epochs");
    if (const json* v = find(obj, "batch_size")) t.batch_size = get_int(*v, "train.batch_size");
    if (const json* v = find(obj, "learning_rate")) t.learning_rate = get_number(*v, "train.learning_rate");
    if (const json* v = find(obj, "beta1")) t.beta1 = get_number(*v, "train.beta1");
    if (const json* v = find(obj, "beta2")) t.beta2 = get_number(*v, "train.beta2");
    if (const json* v = find(obj, "eps")) t.eps = get_number(*v, "train.eps");
    if (const json* v = find(obj, "seed")) t.seed = get_u64(*v, "train.seed");
    if (const json* v = find(obj, "method")) t.method = train_method_from_string(get_string(*v, "train.method"));
    if (const json* v = find(obj, "rcam")) parse_rcam(*v, t.rcam);
    if (const json* v = find(obj, "hidden_width")) t.hidden_width = get_int(*v, "train.hidden_width");
    if (const json* v = find(obj, "layer_count")) t.layer_count = get_int(*v, "train.layer_count");

    if (t.epochs < 0) throw std::runtime_error("field train.epochs: expected a non-negative count");
    if (t.batch_size < 1) throw std::runtime_error("field train.batch_size: expected a positive count");
    if (t.learning_rate <= 0.0) throw std::runtime_error("field train.learning_rate: expected a positive rate");
    if (t.hidden_width < 1 || t.layer_count < 0) {
        throw std::runtime_error("field train.hidden_width/layer_count: expected a valid architecture");
    }
}

}  // namespace

Config parse_config(const std::string& source) {
    std::string text;
    const auto first = source.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && source[first] == '{') {
        text = source;
    } else {
        std::ifstream in(source, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open config: " + source);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        text = buffer.str();
    }

    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw std::runtime_error("config: expected a JSON object");
    check_keys(root, {"scenario", "train", "output_dir", "seeds", "master_seed"});

    Config cfg;
    if (const json* v = find(root, "scenario")) parse_scenario(*v, cfg.scenario);
    if (const json* v = find(root, "train")) parse_train(*v, cfg.train);
    if (const json* v = find(root, "output_dir")) cfg.output_dir = get_string(*v, "output_dir");
    if (const json* v = find(root, "seeds")) {
        if (!v->is_array() || v->empty()) throw std::runtime_error("field seeds: expected a non-empty array");
        cfg.seeds.clear();
        for (const auto& item : *v) cfg.seeds.push_back(get_int(item, "seeds"));
    }
    if (const json* v = find(root, "master_seed")) cfg.master_seed = get_u64(*v, "master_seed");
    if (cfg.output_dir.empty()) throw std::runtime_error("field output_dir: expected a non-empty path");
    return cfg;
}

std::string resolved_json(const Config& config) {
    ordered_json j;
    j["master_seed"] = config.master_seed;
    j["output_dir"] = config.output_dir;
    j["seeds"] = config.seeds;

    ordered_json s;
    s["variant"] = std::string(to_string(config.scenario.variant));
    s["noise_sets"] = config.scenario.noise_sets;
    s["p"] = config.scenario.p;
    s["multiplier"] = config.scenario.multiplier;
    s["std_level"] = std::string(to_string(config.scenario.std_level));
    s["num_classes"] = config.scenario.num_classes;
    s["n_train"] = config.scenario.n_train;
    s["n_test"] = config.scenario.n_test;
    s["noise_edge_frac"] = config.scenario.noise_edge_frac;
    s["noise_node_frac"] = config.scenario.noise_node_frac;
    s["a_min"] = config.scenario.a_min;
    s["a_max"] = config.scenario.a_max;
    s["f_map"] = std::string(to_string(config.scenario.f_map));
    s["h_map"] = std::string(to_string(config.scenario.h_map));
    s["feature_dim"] = config.scenario.feature_dim;
    j["scenario"] = s;

    ordered_json t;
    t["epochs"] = config.train.epochs;
    t["batch_size"] = config.train.batch_size;
    t["learning_rate"] = config.train.learning_rate;
    t["beta1"] = config.train.beta1;
    t["beta2"] = config.train.beta2;
    t["eps"] = config.train.eps;
    t["seed"] = config.train.seed;
    t["method"] = std::string(to_string(config.train.method));
    ordered_json r;
    r["tau"] = config.train.rcam.tau;
    r["lambda"] = config.train.rcam.lambda;
    r["scope"] = std::string(to_string(config.train.rcam.scope));
    t["rcam"] = r;
    t["hidden_width"] = config.train.hidden_width;
    t["layer_count"] = config.train.layer_count;
    j["train"] = t;

    return j.dump(2) + "\n";
}

}  // namespace crcg
