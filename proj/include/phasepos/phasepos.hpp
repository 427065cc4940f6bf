#pragma once

// Umbrella header: carrier-phase positioning simulation and estimation.

#include "phasepos/ambiguity.hpp"
#include "phasepos/campaign.hpp"
#include "phasepos/config_io.hpp"
#include "phasepos/differencing.hpp"
#include "phasepos/errors.hpp"
#include "phasepos/estimator.hpp"
#include "phasepos/export.hpp"
#include "phasepos/geometry.hpp"
#include "phasepos/measurement.hpp"
#include "phasepos/rng.hpp"
#include "phasepos/statistics.hpp"
