#pragma once

#include "gwr/control.hpp"
#include "gwr/dynamics.hpp"
#include "gwr/equilibria.hpp"
#include "gwr/errors.hpp"
#include "gwr/graph.hpp"
#include "gwr/rigidity.hpp"
#include "gwr/scenario.hpp"
#include "gwr/trace_io.hpp"
