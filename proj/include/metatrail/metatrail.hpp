#pragma once

// Umbrella header for the analytics library (the CLI lives in cli.hpp).

#include "metatrail/core.hpp"
#include "metatrail/errors.hpp"
#include "metatrail/graph_io.hpp"
#include "metatrail/ingest.hpp"
#include "metatrail/hotspot.hpp"
#include "metatrail/clustering.hpp"
#include "metatrail/patterns.hpp"
#include "metatrail/flow.hpp"
#include "metatrail/synth.hpp"
