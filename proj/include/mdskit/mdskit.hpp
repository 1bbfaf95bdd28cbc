#pragma once

#include "mdskit/bench.hpp"
#include "mdskit/dataset.hpp"
#include "mdskit/exact.hpp"
#include "mdskit/gcn.hpp"
#include "mdskit/graph.hpp"
#include "mdskit/heuristics.hpp"
#include "mdskit/ig.hpp"
#include "mdskit/maps.hpp"
