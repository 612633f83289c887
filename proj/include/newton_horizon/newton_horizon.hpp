#pragma once

// Newtonian gravity toolkit: mass distributions, exterior potential/field
// evaluation, adaptive trajectory integration, confinement bounds, and
// black-hole classification criteria.

#include "vec3.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "mass_distribution.hpp"
#include "potential.hpp"
#include "dynamics.hpp"
#include "theorems.hpp"
#include "random.hpp"
#include "scenario.hpp"
