#pragma once

#include "heavytail/errors.hpp"
#include "heavytail/estimators.hpp"
#include "heavytail/partition.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/scaling.hpp"
#include "heavytail/simulators.hpp"
#include "heavytail/time_series.hpp"
