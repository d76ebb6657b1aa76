#pragma once

// Convenience header pulling in the whole library.

#include "hetsim/channel.hpp"
#include "hetsim/common.hpp"
#include "hetsim/exhaustive.hpp"
#include "hetsim/experiment.hpp"
#include "hetsim/geometry.hpp"
#include "hetsim/io.hpp"
#include "hetsim/policies.hpp"
#include "hetsim/pwbba.hpp"
#include "hetsim/rates.hpp"
#include "hetsim/uwbba.hpp"
