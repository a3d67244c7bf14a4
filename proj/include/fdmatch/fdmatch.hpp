#pragma once

#include "fdmatch/errors.hpp"
#include "fdmatch/fracstate.hpp"
#include "fdmatch/generators.hpp"
#include "fdmatch/harness.hpp"
#include "fdmatch/instance.hpp"
#include "fdmatch/instance_io.hpp"
#include "fdmatch/mcm_forest.hpp"
#include "fdmatch/mcm_tree.hpp"
#include "fdmatch/mwm_tree.hpp"
#include "fdmatch/oracle.hpp"
#include "fdmatch/pd_verify.hpp"
#include "fdmatch/random.hpp"
#include "fdmatch/rational.hpp"
#include "fdmatch/rounding.hpp"
