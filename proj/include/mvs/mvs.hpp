#pragma once

#include "mvs/coeff.hpp"
#include "mvs/error.hpp"
#include "mvs/freeboundary.hpp"
#include "mvs/geometry.hpp"
#include "mvs/greens.hpp"
#include "mvs/grid.hpp"
#include "mvs/height_field.hpp"
#include "mvs/lcp.hpp"
#include "mvs/mean_value_set.hpp"
#include "mvs/operator.hpp"
#include "mvs/point.hpp"
#include "mvs/solver.hpp"
