#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "poincare/bounds.hpp"
#include "poincare/common.hpp"
#include "poincare/gamma.hpp"
#include "poincare/stein.hpp"
#include "poincare/zoo.hpp"

namespace poincare {

// Flat view of the key-tree experiment config. Grammar (also documented in
// the README):
//   - one binding per line: `dotted.key = value`
//   - `#` starts a comment that runs to the end of the line
//   - blank lines are ignored
//   - list values are whitespace-separated tokens after the `=`
//   - keys may be bound at most once
// Values are taken through the typed accessors below; after the schema has
// consumed what it knows, `finish()` rejects any key that was never read, so
// misspelled options fail loudly instead of being silently ignored.
class ConfigTree {
  public:
    static ConfigTree parse_text(const std::string& text, const std::string& origin = "<text>");
    static ConfigTree parse_file(const std::string& path);

    bool has(const std::string& key) const;

    // Each accessor marks the key as consumed. Without a fallback, a missing
    // key is a schema violation; with one, the fallback is returned.
    std::string take_string(const std::string& key);
    std::string take_string(const std::string& key, const std::string& fallback);
    double take_double(const std::string& key, std::optional<double> fallback = {});
    long take_long(const std::string& key, std::optional<long> fallback = {});
    std::uint64_t take_u64(const std::string& key, std::optional<std::uint64_t> fallback = {});
    bool take_bool(const std::string& key, std::optional<bool> fallback = {});
    std::vector<double> take_doubles(const std::string& key,
                                     std::optional<std::vector<double>> fallback = {});

    // Throws config_error naming every key that was never consumed.
    void finish() const;

  private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
    const std::string& raw(const std::string& key);
};

// Which pipeline stages a run executes.
struct BlockPlan {
    bool gammas = true;
    bool bounds = true;
    bool marked = false;
    bool distances = false;
    bool stein = false;
};

// Fully resolved experiment description. `load_experiment_config` applies the
// schema to a ConfigTree; every field below has a documented config key.
struct ExperimentConfig {
    std::string model_id = "compound_sum_rademacher";
    ZooParams zoo;
    std::vector<double> scales{100.0};
    std::string target_source = "analytic";  // or "estimated"

    BlockPlan blocks;
    NestedMcPlan gamma_plan;  // seed is derived from root_seed at run time

    int bound_l = 2;                   // half-space class size in the dHl display
    std::optional<ConvexGeometry> convex;  // enables the convex-distance display

    double marked_c = 1.0;
    double marked_p = 4.0;

    long distance_n = 10000;
    int distance_budget = 2000;
    int distance_l = 2;
    long prob_draws = 1000000;

    double stein_t = 0.3;
    long stein_draws = 4096;
    int stein_nodes = 64;
    int stein_points = 5;  // catalog size for the residual / sup-bound checks

    std::uint64_t root_seed = 1;
    int workers = 1;
    std::string out_dir = "out";

    // Raises config_error on contradictory settings (e.g. bounds without the
    // gamma block, marked displays on a model without the moment inputs).
    void validate() const;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_text(const std::string& text);

}  // namespace poincare
