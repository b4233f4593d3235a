#pragma once

#include <string>

#include "busim/features.hpp"
#include "busim/types.hpp"

namespace busim::cfgio {

// sensitivity.json: {"groups": {"General": {"beta_L": .., "beta_T": ..,
// "beta_W": .., "beta_C": ..}, ...}} with all four groups required
SensitivitySet load_sensitivity(const std::string& path);
void write_sensitivity(const std::string& path, const SensitivitySet& s);

// coefficients.json: {dimension: {feature: weight}}
feat::Coefficients load_coefficients(const std::string& path);
void write_coefficients(const std::string& path, const feat::Coefficients& c);

// flat key = value config text ("#" comments); unknown keys are errors
SimConfig load_config(const std::string& path);
// canonical dump: stable key order, round-trip exact values; hashed into
// the run manifest and written next to results
std::string dump_config(const SimConfig& cfg);

}  // namespace busim::cfgio
