#pragma once

// Umbrella header for the areal echo state network toolkit.

#include "aesn/config.hpp"
#include "aesn/data.hpp"
#include "aesn/embedding.hpp"
#include "aesn/eof.hpp"
#include "aesn/errors.hpp"
#include "aesn/eurostat.hpp"
#include "aesn/graph.hpp"
#include "aesn/hyperparams.hpp"
#include "aesn/metrics.hpp"
#include "aesn/model.hpp"
#include "aesn/model_io.hpp"
#include "aesn/readout.hpp"
#include "aesn/reservoir.hpp"
#include "aesn/rng.hpp"
#include "aesn/tune.hpp"
#include "aesn/uq.hpp"
