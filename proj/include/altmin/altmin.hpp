#pragma once

// Convenience umbrella: the whole library in one include.

#include "core.hpp"
#include "prox.hpp"
#include "solver.hpp"
#include "plk.hpp"
#include "rates.hpp"
#include "problems.hpp"
#include "json_io.hpp"
#include "cli.hpp"
