// Reverse direction: a process model from a parsed feature document.
#pragma once

#include <vector>

#include "flowspec/diagnostics.hpp"
#include "flowspec/gwt.hpp"
#include "flowspec/model.hpp"

namespace flowspec {

struct Inference {
  ProcessModel model;
  std::vector<Diagnostic> diagnostics;
};

/// Documents that carry transition declarations (strict emissions) are
/// rebuilt from them and every scenario is replayed against the result;
/// failures are reported as ScenarioMismatch errors.
///
/// Otherwise terms are classified in a fixed rule order (hinted roles,
/// negated terms are guards, GIVEN terms are states, trailing THEN terms that
/// look like states are states, other WHEN terms are events, the rest are
/// actions) and scenarios are folded into choice, split and join
/// transitions. Scenarios without a target state get a synthetic sink
/// "_after_<scenario>". Ambiguity is reported, never fatal.
///
/// `extra` is merged over the document's own hints.
Inference infer_model(const FeatureDoc& doc, const InferenceHints& extra = {});

}  // namespace flowspec
