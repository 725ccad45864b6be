#pragma once

/// Umbrella header for the whole library.

#include "mpsls/assignment.hpp"
#include "mpsls/bruteforce.hpp"
#include "mpsls/csv.hpp"
#include "mpsls/error.hpp"
#include "mpsls/experiment.hpp"
#include "mpsls/leverage.hpp"
#include "mpsls/matrix_market.hpp"
#include "mpsls/maxplus.hpp"
#include "mpsls/puiseux.hpp"
#include "mpsls/rng.hpp"
#include "mpsls/sampling.hpp"

namespace mpsls {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mpsls
