#pragma once

// Umbrella header for the stochastic replicator library.

#include "sreplicator/analysis.hpp"
#include "sreplicator/batch.hpp"
#include "sreplicator/classify.hpp"
#include "sreplicator/estimators.hpp"
#include "sreplicator/game.hpp"
#include "sreplicator/lp.hpp"
#include "sreplicator/report.hpp"
#include "sreplicator/rng.hpp"
#include "sreplicator/simulate.hpp"
#include "sreplicator/verify.hpp"
#include "sreplicator/version.hpp"
