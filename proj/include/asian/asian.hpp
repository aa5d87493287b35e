#pragma once

#include "asian/analytics.hpp"
#include "asian/core.hpp"
#include "asian/curran_hybrid.hpp"
#include "asian/errors.hpp"
#include "asian/full_pde.hpp"
#include "asian/monte_carlo.hpp"
#include "asian/parallel.hpp"
#include "asian/pde_engine.hpp"
#include "asian/sobol.hpp"
#include "asian/harness/catalog.hpp"
#include "asian/harness/csv.hpp"
#include "asian/harness/metrics.hpp"
#include "asian/harness/reference.hpp"
#include "asian/harness/scenario_io.hpp"
#include "asian/harness/solvers.hpp"
#include "asian/harness/study.hpp"
