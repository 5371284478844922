#pragma once

#include "minlift/analytic.hpp"
#include "minlift/criteria.hpp"
#include "minlift/errors.hpp"
#include "minlift/grid.hpp"
#include "minlift/lift.hpp"
#include "minlift/mappings.hpp"
#include "minlift/surface.hpp"
