#pragma once

#include <string>

#include "flowspec/model_io.hpp"

inline std::string fixture_path(const std::string& name) { return std::string(FLOWSPEC_FIXTURES) + "/" + name; }

inline flowspec::ProcessModel fixture(const std::string& name) { return flowspec::load_model(fixture_path(name)); }

template <typename F>
std::string error_code(F&& f) {
  try {
    f();
  } catch (const flowspec::Error& e) {
    return e.code();
  }
  return "";
}
