// fogran.hpp - umbrella header

#pragma once

#include "fogran/model.hpp"
#include "fogran/config.hpp"
#include "fogran/analysis.hpp"
#include "fogran/lp.hpp"
#include "fogran/interval_set.hpp"
#include "fogran/scheme.hpp"
#include "fogran/simulator.hpp"
#include "fogran/export.hpp"
#include "fogran/commands.hpp"
