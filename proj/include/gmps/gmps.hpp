#pragma once

// Umbrella header.

#include "gmps/entanglement_analysis.hpp"
#include "gmps/errors.hpp"
#include "gmps/gaussian_states.hpp"
#include "gmps/io.hpp"
#include "gmps/mps_builder.hpp"
#include "gmps/reports.hpp"
#include "gmps/symplectic_core.hpp"
