#pragma once

#include "swp/budget.hpp"
#include "swp/errors.hpp"
#include "swp/grid.hpp"
#include "swp/optimizer.hpp"
#include "swp/quadrature.hpp"
#include "swp/saturating.hpp"
#include "swp/simulation.hpp"
