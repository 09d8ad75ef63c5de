#pragma once

#include "itersolve/convergence.hpp"
#include "itersolve/direct.hpp"
#include "itersolve/errors.hpp"
#include "itersolve/io.hpp"
#include "itersolve/matrix.hpp"
#include "itersolve/solve.hpp"
#include "itersolve/stationary.hpp"
#include "itersolve/traffic.hpp"
