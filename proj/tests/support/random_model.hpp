// Seeded generator of valid process models for property tests.
#pragma once

#include <random>

#include "flowspec/model.hpp"

namespace flowspec::testing {

struct GeneratorLimits {
  int max_states = 12;
  int max_transitions = 10;
  int max_or_join_arity = 4;
};

/// A model that passes validate(), or std::nullopt after too many rejected
/// drafts. Events and guard atoms are fresh per branch, so strict scenarios
/// never trigger a competing transition.
std::optional<ProcessModel> random_model(std::mt19937& rng, const GeneratorLimits& limits = {});

}  // namespace flowspec::testing
