#pragma once

// Tree-structured Gaussian graphical models: construction, Chow-Liu
// structure learning, exact and closed-form approximate error exponents,
// extremal-structure scans, and Monte Carlo error-probability estimation.

#include "gausstree/approx_rate.hpp"
#include "gausstree/chow_liu.hpp"
#include "gausstree/crossover.hpp"
#include "gausstree/empirical.hpp"
#include "gausstree/errors.hpp"
#include "gausstree/exact_rate.hpp"
#include "gausstree/exponent.hpp"
#include "gausstree/extremal.hpp"
#include "gausstree/io.hpp"
#include "gausstree/model.hpp"
#include "gausstree/parallel.hpp"
#include "gausstree/rng.hpp"
#include "gausstree/simulate.hpp"
#include "gausstree/tree.hpp"
