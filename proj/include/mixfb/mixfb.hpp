#pragma once

#include "mixfb/config.hpp"
#include "mixfb/dominance.hpp"
#include "mixfb/equilibria.hpp"
#include "mixfb/fast_slow.hpp"
#include "mixfb/harmonic_balance.hpp"
#include "mixfb/linalg.hpp"
#include "mixfb/loop.hpp"
#include "mixfb/nonlinearity.hpp"
#include "mixfb/polynomial.hpp"
#include "mixfb/simulate.hpp"
#include "mixfb/state_space.hpp"
#include "mixfb/transfer_function.hpp"
#include "mixfb/two_mass.hpp"
