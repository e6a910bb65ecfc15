// Step-definition skeletons: a match pattern and a function-name slug per
// distinct step.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flowspec/gwt.hpp"

namespace flowspec {

struct StepSkeleton {
  std::string keyword;  // Given, When or Then
  std::string pattern;
  std::string slug;

  bool operator==(const StepSkeleton&) const = default;
};

/// Quoted substrings become "(.*)" groups and "groupN" slug tokens; bare
/// numbers stay literal. Throws Error("UnbalancedQuotes").
StepSkeleton extract_skeleton(std::string_view keyword, std::string_view step_text);

/// One skeleton per distinct (keyword, pattern) in first-occurrence order.
/// Colliding slugs get _2, _3, ... suffixes.
std::vector<StepSkeleton> emit_skeletons(const FeatureDoc& doc);

/// JSON array of {keyword, pattern, slug}.
std::string skeletons_json(const std::vector<StepSkeleton>& skeletons);

}  // namespace flowspec
