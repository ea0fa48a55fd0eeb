#pragma once

#include <string>

#include "fraudlab/experiments.hpp"

namespace fraudlab {

/// Parses the experiment config format: `[section]` headers, `key = value`
/// lines, `#` comments. Unknown sections or keys are rejected by name.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Normalized text form of a config; parse_config(serialize_config(c))
/// reproduces c. Embedded in every experiment manifest.
std::string serialize_config(const ExperimentConfig& config);

/// "key=value,key=value" synthetic spec, as accepted by the --synthetic flag
/// and the [data] synthetic config key. Keys: n_majority, n_minority, dims,
/// sep, clusters, seed.
SyntheticSpec parse_synthetic_spec(const std::string& text);
std::string synthetic_spec_to_string(const SyntheticSpec& spec);

/// Sets one named hyperparameter ("trees", "depth", "l2", ...) on a spec.
/// Unknown knobs are rejected by name. Shared by [models] keys and --hyper.
void apply_hyper(ModelSpec& spec, const std::string& knob, const std::string& value);

} // namespace fraudlab
