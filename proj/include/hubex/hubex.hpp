// Umbrella header.
#pragma once

#include "hubex/aggregate_function.hpp"
#include "hubex/aggregation.hpp"
#include "hubex/bench.hpp"
#include "hubex/condense.hpp"
#include "hubex/engine.hpp"
#include "hubex/extraction.hpp"
#include "hubex/generator.hpp"
#include "hubex/graph.hpp"
#include "hubex/hubs.hpp"
#include "hubex/query.hpp"
#include "hubex/reachability.hpp"
#include "hubex/sample.hpp"
#include "hubex/service.hpp"
#include "hubex/structural.hpp"
#include "hubex/tags.hpp"
#include "hubex/view.hpp"
