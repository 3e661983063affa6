#pragma once

#include "dirbreak/geom.hpp"
#include "dirbreak/numerics.hpp"
#include "dirbreak/measure.hpp"
#include "dirbreak/metric.hpp"
#include "dirbreak/group.hpp"
#include "dirbreak/functional.hpp"
#include "dirbreak/breakdown.hpp"
#include "dirbreak/io.hpp"
