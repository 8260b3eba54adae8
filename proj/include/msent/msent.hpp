#pragma once

#include "msent/analytics.hpp"
#include "msent/arith.hpp"
#include "msent/bits.hpp"
#include "msent/coarsen.hpp"
#include "msent/errors.hpp"
#include "msent/generators.hpp"
#include "msent/graph.hpp"
#include "msent/linkpred.hpp"
#include "msent/normalize.hpp"
#include "msent/pipeline.hpp"
#include "msent/rng.hpp"
#include "msent/stats.hpp"
#include "msent/szip.hpp"
#include "msent/version.hpp"
