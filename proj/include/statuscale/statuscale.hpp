#pragma once

#include "statuscale/calibrate.hpp"
#include "statuscale/compare.hpp"
#include "statuscale/config.hpp"
#include "statuscale/detector.hpp"
#include "statuscale/errors.hpp"
#include "statuscale/horizontal.hpp"
#include "statuscale/metrics.hpp"
#include "statuscale/pid.hpp"
#include "statuscale/plant.hpp"
#include "statuscale/predictor.hpp"
#include "statuscale/random.hpp"
#include "statuscale/simulator.hpp"
#include "statuscale/trace.hpp"
