#pragma once

#include "evcorner/baselines.hpp"
#include "evcorner/config.hpp"
#include "evcorner/cost_model.hpp"
#include "evcorner/counters.hpp"
#include "evcorner/detector.hpp"
#include "evcorner/eval.hpp"
#include "evcorner/events.hpp"
#include "evcorner/experiment.hpp"
#include "evcorner/harris.hpp"
#include "evcorner/noise_filter.hpp"
#include "evcorner/ordered_surface.hpp"
#include "evcorner/temporal_array.hpp"
