#pragma once

#include "darkstates/analysis.hpp"
#include "darkstates/constants.hpp"
#include "darkstates/disorder.hpp"
#include "darkstates/eigensolve.hpp"
#include "darkstates/errors.hpp"
#include "darkstates/experiments.hpp"
#include "darkstates/geometry.hpp"
#include "darkstates/hamiltonian.hpp"
#include "darkstates/oracle.hpp"
#include "darkstates/philox.hpp"
#include "darkstates/version.hpp"
