#pragma once

// Umbrella header.
#include "rootkit/analysis.hpp"
#include "rootkit/errors.hpp"
#include "rootkit/expr.hpp"
#include "rootkit/format.hpp"
#include "rootkit/jet.hpp"
#include "rootkit/kernels.hpp"
#include "rootkit/problems.hpp"
#include "rootkit/solver.hpp"
