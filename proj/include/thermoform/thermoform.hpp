#pragma once

#include "error.hpp"
#include "interval_maps.hpp"
#include "parallel.hpp"
#include "renewal.hpp"
#include "rpf.hpp"
#include "sequences.hpp"
#include "series.hpp"
#include "symbolic.hpp"
#include "types.hpp"
