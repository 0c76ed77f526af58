#pragma once

#include "lagcut/bench.hpp"
#include "lagcut/driver.hpp"
#include "lagcut/gen.hpp"
#include "lagcut/heuristics.hpp"
#include "lagcut/io.hpp"
#include "lagcut/master.hpp"
#include "lagcut/model.hpp"
#include "lagcut/parallel.hpp"
#include "lagcut/primal.hpp"
#include "lagcut/rng.hpp"
#include "lagcut/simplex.hpp"
#include "lagcut/subproblem.hpp"
