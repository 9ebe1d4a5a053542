#include "permeq/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace permeq {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed)
            if (item.key() == key) { ok = true; break; }
        if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

double get_probability_like(const json& obj, const char* key, double fallback, bool required) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(std::string("missing key '") + key + "'");
        return fallback;
    }
    if (!obj[key].is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
    return obj[key].get<double>();
}

CIMethod parse_method(const json& obj) {
    require_keys(obj, "method", {"family", "alphabet_size", "eta", "sigma"});
    CIMethod m;
    if (!obj.contains("family") || !obj["family"].is_string())
        throw ConfigError("method.family must be a string");
    try {
        m.family = ci_family_from_string(obj["family"].get<std::string>());
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (obj.contains("alphabet_size")) m.alphabet_size = obj["alphabet_size"].get<int>();
    m.eta = get_probability_like(obj, "eta", 2.0, false);
    m.sigma = get_probability_like(obj, "sigma", 0.5, false);
    return m;
}

InstanceConfig parse_instance(const json& obj) {
    require_keys(obj, "instance", {"q", "permutations", "n"});
    InstanceConfig out;
    if (!obj.contains("q") || !obj["q"].is_array())
        throw ConfigError("instance.q must be a list of probabilities");
    out.q = obj["q"].get<std::vector<double>>();
    double total = 0.0;
    for (double v : out.q) {
        if (v < 0.0) throw ConfigError("instance.q entries must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("instance.q must sum to 1 within 1e-9");

    if (!obj.contains("n") || !obj["n"].is_array())
        throw ConfigError("instance.n must be a list of sample sizes");
    out.sample_sizes = obj["n"].get<std::vector<std::int64_t>>();
    for (std::int64_t n : out.sample_sizes)
        if (n < 1) throw ConfigError("instance.n entries must be >= 1");

    if (!obj.contains("permutations"))
        throw ConfigError("instance.permutations is required ('random' or index lists)");
    if (obj["permutations"].is_string()) {
        if (obj["permutations"].get<std::string>() != "random")
            throw ConfigError("instance.permutations: only the string 'random' is accepted");
        out.random_permutations = true;
    } else if (obj["permutations"].is_array()) {
        out.permutations = obj["permutations"].get<std::vector<std::vector<std::uint32_t>>>();
        if (out.permutations.size() != out.sample_sizes.size())
            throw ConfigError("instance.permutations must list one permutation per distribution");
        for (const auto& perm : out.permutations) {
            if (perm.size() != out.q.size())
                throw ConfigError("instance.permutations entries must have the alphabet length");
            std::vector<char> seen(out.q.size(), 0);
            for (std::uint32_t v : perm) {
                if (v >= out.q.size() || seen[v])
                    throw ConfigError("instance.permutations entries must be bijections");
                seen[v] = 1;
            }
        }
    } else {
        throw ConfigError("instance.permutations must be 'random' or a list of index lists");
    }
    return out;
}

RatioConfig parse_ratio(const json& obj) {
    require_keys(obj, "ratio",
                 {"alphabet_size", "support_size", "family_size", "n_primary", "L_values",
                  "n_primary_values"});
    RatioConfig out;
    if (obj.contains("alphabet_size")) out.alphabet_size = obj["alphabet_size"].get<int>();
    if (obj.contains("support_size")) out.support_size = obj["support_size"].get<int>();
    if (obj.contains("family_size")) out.family_size = obj["family_size"].get<int>();
    if (obj.contains("n_primary")) out.n_primary = obj["n_primary"].get<std::int64_t>();
    if (obj.contains("L_values"))
        out.clique_caps = obj["L_values"].get<std::vector<std::int64_t>>();
    if (obj.contains("n_primary_values"))
        out.n_primary_values = obj["n_primary_values"].get<std::vector<std::int64_t>>();
    if (out.support_size < 1 || out.support_size > out.alphabet_size)
        throw ConfigError("ratio.support_size must lie in [1, alphabet_size]");
    if (out.family_size < 1) throw ConfigError("ratio.family_size must be >= 1");
    if (out.n_primary < 4) throw ConfigError("ratio.n_primary must be >= 4");
    if (out.clique_caps.empty()) throw ConfigError("ratio.L_values must be nonempty");
    return out;
}

RateConfig parse_rate(const json& obj) {
    require_keys(obj, "rate", {"q", "family_size", "n_grid"});
    RateConfig out;
    if (!obj.contains("q") || !obj["q"].is_array())
        throw ConfigError("rate.q must be a list of probabilities");
    out.q = obj["q"].get<std::vector<double>>();
    if (obj.contains("family_size")) out.family_size = obj["family_size"].get<int>();
    if (!obj.contains("n_grid") || !obj["n_grid"].is_array())
        throw ConfigError("rate.n_grid must be a list of sample sizes");
    out.size_grid = obj["n_grid"].get<std::vector<std::int64_t>>();
    if (out.size_grid.size() < 2) throw ConfigError("rate.n_grid needs at least two sizes");
    return out;
}

RlConfig parse_rl(const json& obj) {
    require_keys(obj, "rl", {"num_states", "horizon", "algorithms", "trace_stride"});
    RlConfig out;
    if (obj.contains("num_states")) out.num_states = obj["num_states"].get<int>();
    if (obj.contains("horizon")) out.horizon = obj["horizon"].get<std::int64_t>();
    if (obj.contains("trace_stride")) out.trace_stride = obj["trace_stride"].get<std::int64_t>();
    if (obj.contains("algorithms")) {
        out.run_ucrl2b = false;
        out.run_c_ucrl2b = false;
        for (const auto& name : obj["algorithms"]) {
            const std::string algo = name.get<std::string>();
            if (algo == "ucrl2b") out.run_ucrl2b = true;
            else if (algo == "c-ucrl2b") out.run_c_ucrl2b = true;
            else throw ConfigError("rl.algorithms: unknown algorithm '" + algo + "'");
        }
    }
    if (out.num_states < 3) throw ConfigError("rl.num_states must be >= 3");
    if (out.horizon < 1) throw ConfigError("rl.horizon must be >= 1");
    if (out.trace_stride < 1) throw ConfigError("rl.trace_stride must be >= 1");
    return out;
}

} // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Refine: return "refine";
        case ExperimentKind::Coverage: return "coverage";
        case ExperimentKind::RatioSweep: return "ratio-sweep";
        case ExperimentKind::RateSweep: return "rate-sweep";
        case ExperimentKind::Rl: return "rl";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "refine") return ExperimentKind::Refine;
    if (name == "coverage") return ExperimentKind::Coverage;
    if (name == "ratio-sweep") return ExperimentKind::RatioSweep;
    if (name == "rate-sweep") return ExperimentKind::RateSweep;
    if (name == "rl") return ExperimentKind::Rl;
    throw ConfigError("unknown experiment kind: " + name);
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    require_keys(root, "config",
                 {"kind", "delta", "method", "L_prune", "seed", "reps", "out_dir", "instance",
                  "ratio", "rate", "rl"});

    ExperimentConfig cfg;
    if (!root.contains("kind") || !root["kind"].is_string())
        throw ConfigError("config.kind is required");
    cfg.kind = experiment_kind_from_string(root["kind"].get<std::string>());

    cfg.delta = get_probability_like(root, "delta", 0.1, cfg.kind != ExperimentKind::Rl);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");

    if (root.contains("L_prune")) cfg.prune_clique_cap = root["L_prune"].get<std::int64_t>();
    if (cfg.prune_clique_cap < 1) throw ConfigError("L_prune must be >= 1");
    if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("reps")) cfg.replications = root["reps"].get<std::int64_t>();
    if (cfg.replications < 1) throw ConfigError("reps must be >= 1");
    if (root.contains("out_dir")) cfg.out_dir = root["out_dir"].get<std::string>();

    if (root.contains("instance")) cfg.instance = parse_instance(root["instance"]);
    if (root.contains("ratio")) cfg.ratio = parse_ratio(root["ratio"]);
    if (root.contains("rate")) cfg.rate = parse_rate(root["rate"]);
    if (root.contains("rl")) cfg.rl = parse_rl(root["rl"]);

    const bool needs_method =
        cfg.kind == ExperimentKind::Refine || cfg.kind == ExperimentKind::Coverage;
    if (root.contains("method")) {
        cfg.method = parse_method(root["method"]);
    } else if (needs_method) {
        throw ConfigError("config.method is required for refine and coverage");
    } else {
        cfg.method.family = cfg.kind == ExperimentKind::RateSweep
                                ? CIFamily::Bernstein
                                : CIFamily::EmpiricalBernstein;
    }

    switch (cfg.kind) {
        case ExperimentKind::Refine:
        case ExperimentKind::Coverage:
            if (!cfg.instance) throw ConfigError("config.instance is required for this kind");
            if (cfg.method.alphabet_size != static_cast<int>(cfg.instance->q.size()))
                throw ConfigError("method.alphabet_size must equal the alphabet size of q");
            break;
        case ExperimentKind::RatioSweep:
            if (!cfg.ratio) throw ConfigError("config.ratio is required for ratio-sweep");
            break;
        case ExperimentKind::RateSweep:
            if (!cfg.rate) throw ConfigError("config.rate is required for rate-sweep");
            break;
        case ExperimentKind::Rl:
            if (!cfg.rl) throw ConfigError("config.rl is required for rl");
            break;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

} // namespace permeq
