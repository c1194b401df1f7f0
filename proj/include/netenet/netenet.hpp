#pragma once

// Umbrella header for the network elastic net library.

#include "netenet/admm.hpp"
#include "netenet/aft.hpp"
#include "netenet/cluster.hpp"
#include "netenet/csv.hpp"
#include "netenet/errors.hpp"
#include "netenet/graph.hpp"
#include "netenet/inference.hpp"
#include "netenet/io.hpp"
#include "netenet/path.hpp"
#include "netenet/pipeline.hpp"
#include "netenet/prox.hpp"
#include "netenet/synth.hpp"
