#pragma once

#include "mslab/clusters.hpp"
#include "mslab/core.hpp"
#include "mslab/engine.hpp"
#include "mslab/experiments.hpp"
#include "mslab/io.hpp"
#include "mslab/kernel.hpp"
#include "mslab/random.hpp"
#include "mslab/schedule.hpp"
#include "mslab/state.hpp"
#include "mslab/stats.hpp"
#include "mslab/synthdata.hpp"
#include "mslab/theory.hpp"
