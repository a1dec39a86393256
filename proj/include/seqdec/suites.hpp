#pragma once

// Fixed-seed property suites run by `seqdec verify`.

#include "seqdec/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqdec {

// Individual suites in run order; "all" runs every one.
std::vector<std::string> suite_names();

// Throws std::invalid_argument for an unknown name.
Report run_suite(const std::string& name, std::uint64_t seed = 1);

}  // namespace seqdec
