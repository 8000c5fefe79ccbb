#pragma once

#include "gmanova/design.hpp"
#include "gmanova/error.hpp"
#include "gmanova/estimators.hpp"
#include "gmanova/linalg.hpp"
#include "gmanova/normal.hpp"
#include "gmanova/scenarios.hpp"
#include "gmanova/simulation.hpp"
#include "gmanova/test_engine.hpp"

namespace gmanova {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gmanova
