#pragma once

// Umbrella header for the bearing-based formation maneuvering library.

#include "bfm/bearing_spec.hpp"
#include "bfm/control.hpp"
#include "bfm/dense.hpp"
#include "bfm/errors.hpp"
#include "bfm/geom.hpp"
#include "bfm/graph.hpp"
#include "bfm/metrics.hpp"
#include "bfm/profile.hpp"
#include "bfm/scenario.hpp"
#include "bfm/sim.hpp"
#include "bfm/svg.hpp"
#include "bfm/trace_io.hpp"
