#pragma once

#include "basis.hpp"
#include "dynamics.hpp"
#include "model.hpp"
#include "numerics.hpp"
#include "propagator.hpp"
#include "scenario.hpp"
