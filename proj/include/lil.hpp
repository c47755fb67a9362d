#pragma once

#include "lil/constants.hpp"
#include "lil/entropy_ct.hpp"
#include "lil/envelopes.hpp"
#include "lil/error.hpp"
#include "lil/grid_spaces.hpp"
#include "lil/lil_bounds.hpp"
#include "lil/parallel.hpp"
#include "lil/partitions.hpp"
#include "lil/simulate.hpp"
