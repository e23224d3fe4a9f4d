#pragma once

#include "mamd/model.hpp"
#include "mamd/tensor.hpp"
#include "mamd/flow.hpp"
#include "mamd/lp.hpp"
#include "mamd/market.hpp"
#include "mamd/rng.hpp"
#include "mamd/sim.hpp"
#include "mamd/io.hpp"
