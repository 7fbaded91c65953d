#pragma once

#include <string>

#include "analytics.hpp"
#include "dist.hpp"
#include "policy.hpp"

namespace boostq::config {

/// Parses a distribution declared by variant name and named parameters, e.g.
/// {"type":"exponential","rate":1.0}. Throws Error(parse) on bad input.
SizeDistribution dist_from_json(const std::string& text);

/// Parses either a bare distribution object (full information) or
/// {"labels":[{"p":...,"dist":{...}},...]}.
LabelSizeModel model_from_json(const std::string& text);

/// {"type":"zero"|"theta_optimal"|"constant"|"table"|"reciprocal", ...}.
BoostFunction boost_from_json(const std::string& text);

/// {"type":"fcfs"|"srpt"|"boost"|"cheat-boost"|"nudge"|"nudge-k"|"nudge-m", ...}.
PolicySpec policy_from_json(const std::string& text);

std::string dist_to_json(const SizeDistribution& dist);
std::string model_to_json(const LabelSizeModel& model);

} // namespace boostq::config
