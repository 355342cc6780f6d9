#pragma once

#include <ostream>
#include <string>

#include "poincare/config.hpp"

namespace poincare {

// Executes the configured pipeline: per scale it builds the model, estimates
// the requested ingredients, assembles bounds, estimates distances, runs the
// interpolant checks, and writes one CSV per block plus witness/sample files;
// a run-level summary.txt collects totals, rate-slope fits across scales and
// the check table. `only` restricts the run to one stage ("simulate",
// "gammas", "bounds", "distances", "stein", "rates"), overriding the config's
// run flags; the empty string keeps them.
//
// Returns the process exit code: 0 when every enabled inequality check passed
// under the 3-standard-error policy and no estimator raised its instability
// flag, 1 otherwise. Config schema violations throw config_error, which the
// CLI maps to exit code 2.
int run_experiment(const ExperimentConfig& config, const std::string& only = "",
                   std::ostream* log = nullptr);

// Recomputes the |empirical - Gaussian| gap of a stored witness over a stored
// sample file. On the original samples the replayed value is bit-identical to
// the recorded one; on fresh samples from the same model it must agree within
// 3 binomial standard errors. Returns 0 when the comparison passes, 1
// otherwise; malformed or empty files throw config_error.
int replay_witness_files(const std::string& witness_path, const std::string& samples_path,
                         std::ostream& log);

}  // namespace poincare
