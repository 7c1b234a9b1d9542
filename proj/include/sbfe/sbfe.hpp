#pragma once

#include "sbfe/decision_tree.hpp"
#include "sbfe/errors.hpp"
#include "sbfe/exact_dp.hpp"
#include "sbfe/experiments.hpp"
#include "sbfe/formula.hpp"
#include "sbfe/generators.hpp"
#include "sbfe/oracle.hpp"
#include "sbfe/problem.hpp"
#include "sbfe/random.hpp"
#include "sbfe/set_cover.hpp"
#include "sbfe/strategies.hpp"
