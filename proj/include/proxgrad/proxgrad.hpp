#pragma once

#include "proxgrad/core.hpp"
#include "proxgrad/diagnostics.hpp"
#include "proxgrad/problem.hpp"
#include "proxgrad/prox_oracles.hpp"
#include "proxgrad/run_config.hpp"
#include "proxgrad/smooth_oracles.hpp"
#include "proxgrad/solver.hpp"
#include "proxgrad/solver_config.hpp"
#include "proxgrad/trace.hpp"
