#include "poincare/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace poincare {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    char prev = '\0';
    for (char c : key) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
        if (!ok) return false;
        if (c == '.' && prev == '.') return false;
        prev = c;
    }
    return true;
}

std::vector<std::string> split_tokens(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream in(value);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double_token(const std::string& key, const std::string& tok) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
        throw config_error("config key '" + key + "': '" + tok + "' is not a number");
    return v;
}

}  // namespace

ConfigTree ConfigTree::parse_text(const std::string& text, const std::string& origin) {
    ConfigTree tree;
    tree.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw config_error(where + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw config_error(where + ": malformed key '" + key + "'");
        if (value.empty()) throw config_error(where + ": key '" + key + "' has no value");
        if (!tree.values_.emplace(key, value).second)
            throw config_error(where + ": key '" + key + "' bound twice");
    }
    return tree;
}

ConfigTree ConfigTree::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

bool ConfigTree::has(const std::string& key) const { return values_.count(key) != 0; }

const std::string& ConfigTree::raw(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end())
        throw config_error(origin_ + ": required config key '" + key + "' is missing");
    used_.insert(key);
    return it->second;
}

std::string ConfigTree::take_string(const std::string& key) { return raw(key); }

std::string ConfigTree::take_string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return raw(key);
}

double ConfigTree::take_double(const std::string& key, std::optional<double> fallback) {
    if (!has(key) && fallback) return *fallback;
    return parse_double_token(key, raw(key));
}

long ConfigTree::take_long(const std::string& key, std::optional<long> fallback) {
    if (!has(key) && fallback) return *fallback;
    const std::string tok = raw(key);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
        throw config_error("config key '" + key + "': '" + tok + "' is not an integer");
    return v;
}

std::uint64_t ConfigTree::take_u64(const std::string& key, std::optional<std::uint64_t> fallback) {
    if (!has(key) && fallback) return *fallback;
    const std::string tok = raw(key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0' || errno == ERANGE || tok.front() == '-')
        throw config_error("config key '" + key + "': '" + tok +
                           "' is not an unsigned 64-bit integer");
    return static_cast<std::uint64_t>(v);
}

bool ConfigTree::take_bool(const std::string& key, std::optional<bool> fallback) {
    if (!has(key) && fallback) return *fallback;
    const std::string tok = raw(key);
    if (tok == "true" || tok == "1" || tok == "yes" || tok == "on") return true;
    if (tok == "false" || tok == "0" || tok == "no" || tok == "off") return false;
    throw config_error("config key '" + key + "': '" + tok + "' is not a boolean");
}

std::vector<double> ConfigTree::take_doubles(const std::string& key,
                                             std::optional<std::vector<double>> fallback) {
    if (!has(key) && fallback) return *fallback;
    const std::string value = raw(key);
    std::vector<double> out;
    for (const std::string& tok : split_tokens(value)) out.push_back(parse_double_token(key, tok));
    if (out.empty()) throw config_error("config key '" + key + "': empty list");
    return out;
}

void ConfigTree::finish() const {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : values_)
        if (!used_.count(key)) unknown.push_back(key);
    if (unknown.empty()) return;
    std::string msg = origin_ + ": unknown config key(s):";
    for (const std::string& k : unknown) msg += " '" + k + "'";
    throw config_error(msg);
}

void ExperimentConfig::validate() const {
    bool known = false;
    for (const std::string& id : zoo_ids()) known = known || id == model_id;
    if (!known) throw config_error("unknown model id '" + model_id + "'");
    if (scales.empty()) throw config_error("at least one scale is required");
    for (double s : scales)
        if (!(s > 0)) throw config_error("scales must be positive");
    if (target_source != "analytic" && target_source != "estimated")
        throw config_error("target must be 'analytic' or 'estimated'");
    if (blocks.bounds && !blocks.gammas)
        throw config_error("the bound block needs the gamma block (set gammas.run = true)");
    if (blocks.marked && !blocks.bounds)
        throw config_error("the marked block needs the bound block (set bounds.run = true)");
    if (blocks.marked && !(marked_p > 2))
        throw config_error(
            "marked.p must exceed 2 (the fourth support ingredient is undefined otherwise)");
    if (blocks.marked && !(marked_c > 0))
        throw config_error("marked.c must be positive");
    if (gamma_plan.n_outer < 2 || gamma_plan.n_inner < 2 || gamma_plan.n_mid < 1)
        throw config_error("gamma budgets need n_outer >= 2, n_inner >= 2, n_mid >= 1");
    if (blocks.marked && gamma_plan.n_mid < 2)
        throw config_error("the marked block squares inner integrals and needs gammas.n_mid >= 2");
    if (bound_l < 1 || distance_l < 1) throw config_error("half-space class sizes must be >= 1");
    if (convex && !(convex->rho > 0 && convex->lambda_A > 0 && convex->tail_integral >= 0))
        throw config_error("convex geometry needs rho > 0, lambda_a > 0, tail >= 0");
    if (blocks.distances && distance_n < 2)
        throw config_error("distances.n must be at least 2");
    if (distance_budget < 4) throw config_error("distances.budget must be at least 4");
    if (prob_draws < 100) throw config_error("distances.prob_draws must be at least 100");
    if (blocks.stein && !(stein_t > 0 && stein_t < 1))
        throw config_error("stein.t must lie in (0, 1)");
    if (stein_draws < 16 || stein_nodes < 4)
        throw config_error("stein budgets need draws >= 16 and nodes >= 4");
    if (stein_points < 1) throw config_error("stein.points must be >= 1");
    if (workers < 1) throw config_error("workers must be >= 1");
    if (out_dir.empty()) throw config_error("output directory must not be empty");
}

namespace {

ExperimentConfig config_from_tree(ConfigTree tree) {
    ExperimentConfig cfg;

    cfg.model_id = tree.take_string("model", cfg.model_id);
    cfg.zoo.theta = tree.take_double("theta", cfg.zoo.theta);
    cfg.zoo.boolean_intensity = tree.take_double("boolean.intensity", cfg.zoo.boolean_intensity);
    cfg.zoo.r_min = tree.take_double("boolean.r_min", cfg.zoo.r_min);
    cfg.zoo.r_max = tree.take_double("boolean.r_max", cfg.zoo.r_max);
    cfg.zoo.calibration_n = tree.take_long("calibration.n", cfg.zoo.calibration_n);
    cfg.zoo.calibration_seed = tree.take_u64("calibration.seed", cfg.zoo.calibration_seed);

    // `windows` is a Boolean-model convenience: window sides L translate to
    // expected grain counts s = intensity * L^2, the scale unit used
    // everywhere else.
    if (tree.has("windows")) {
        if (tree.has("scales"))
            throw config_error("give either 'scales' or 'windows', not both");
        std::vector<double> windows = tree.take_doubles("windows");
        cfg.scales.clear();
        for (double L : windows) {
            if (!(L > 0)) throw config_error("windows must be positive");
            cfg.scales.push_back(cfg.zoo.boolean_intensity * L * L);
        }
    } else {
        cfg.scales = tree.take_doubles("scales", cfg.scales);
    }

    cfg.target_source = tree.take_string("target", cfg.target_source);
    cfg.root_seed = tree.take_u64("seed", cfg.root_seed);
    cfg.workers = static_cast<int>(tree.take_long("workers", cfg.workers));
    cfg.out_dir = tree.take_string("out", cfg.out_dir);

    cfg.blocks.gammas = tree.take_bool("gammas.run", cfg.blocks.gammas);
    cfg.gamma_plan.n_outer = tree.take_long("gammas.n_outer", cfg.gamma_plan.n_outer);
    cfg.gamma_plan.n_inner = tree.take_long("gammas.n_inner", cfg.gamma_plan.n_inner);
    cfg.gamma_plan.n_mid = tree.take_long("gammas.n_mid", cfg.gamma_plan.n_mid);

    cfg.blocks.bounds = tree.take_bool("bounds.run", cfg.blocks.bounds);
    cfg.bound_l = static_cast<int>(tree.take_long("bounds.l", cfg.bound_l));

    const bool any_convex = tree.has("convex.rho") || tree.has("convex.lambda_a") ||
                            tree.has("convex.tail");
    if (any_convex) {
        ConvexGeometry g;
        g.rho = tree.take_double("convex.rho");
        g.lambda_A = tree.take_double("convex.lambda_a");
        g.tail_integral = tree.take_double("convex.tail", 0.0);
        cfg.convex = g;
    }

    cfg.blocks.marked = tree.take_bool("marked.run", cfg.blocks.marked);
    cfg.marked_c = tree.take_double("marked.c", cfg.marked_c);
    cfg.marked_p = tree.take_double("marked.p", cfg.marked_p);

    cfg.blocks.distances = tree.take_bool("distances.run", cfg.blocks.distances);
    cfg.distance_n = tree.take_long("distances.n", cfg.distance_n);
    cfg.distance_budget = static_cast<int>(tree.take_long("distances.budget", cfg.distance_budget));
    cfg.distance_l = static_cast<int>(tree.take_long("distances.l", cfg.distance_l));
    cfg.prob_draws = tree.take_long("distances.prob_draws", cfg.prob_draws);

    cfg.blocks.stein = tree.take_bool("stein.run", cfg.blocks.stein);
    cfg.stein_t = tree.take_double("stein.t", cfg.stein_t);
    cfg.stein_draws = tree.take_long("stein.draws", cfg.stein_draws);
    cfg.stein_nodes = static_cast<int>(tree.take_long("stein.nodes", cfg.stein_nodes));
    cfg.stein_points = static_cast<int>(tree.take_long("stein.points", cfg.stein_points));

    tree.finish();
    cfg.validate();
    return cfg;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    return config_from_tree(ConfigTree::parse_file(path));
}

ExperimentConfig experiment_config_from_text(const std::string& text) {
    return config_from_tree(ConfigTree::parse_text(text));
}

}  // namespace poincare
