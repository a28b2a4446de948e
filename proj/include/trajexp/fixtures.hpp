#pragma once

#include <functional>

#include "trajexp/json_io.hpp"

namespace trajexp {

/// Named, self-contained run configuration with an optional closed-form
/// trajectory for oracle cross-checks.
struct Fixture {
  std::string name;
  std::string description;
  json config;
  std::function<VecD(double)> closed_form;  // null when no closed form exists
};

std::vector<std::string> fixture_names();
Fixture make_fixture(const std::string& name);

}  // namespace trajexp
