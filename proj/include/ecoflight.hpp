#pragma once

#include "ecoflight/bench.hpp"
#include "ecoflight/energy.hpp"
#include "ecoflight/errors.hpp"
#include "ecoflight/geometry.hpp"
#include "ecoflight/planners.hpp"
#include "ecoflight/search.hpp"
#include "ecoflight/world.hpp"
