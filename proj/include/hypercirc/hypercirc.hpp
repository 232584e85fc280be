#pragma once

// Umbrella header pulling in the whole library

#include "angle.hpp"          // IWYU pragma: export
#include "baselines.hpp"      // IWYU pragma: export
#include "bessel.hpp"         // IWYU pragma: export
#include "disk.hpp"           // IWYU pragma: export
#include "inference.hpp"      // IWYU pragma: export
#include "io.hpp"             // IWYU pragma: export
#include "method.hpp"         // IWYU pragma: export
#include "montecarlo.hpp"     // IWYU pragma: export
#include "pipeline.hpp"       // IWYU pragma: export
#include "rng.hpp"            // IWYU pragma: export
#include "version.hpp"        // IWYU pragma: export
#include "von_mises.hpp"      // IWYU pragma: export
