#pragma once

// Umbrella header.
#include "tsgof/arma.hpp"
#include "tsgof/bootstrap.hpp"
#include "tsgof/dcov.hpp"
#include "tsgof/empirical.hpp"
#include "tsgof/error.hpp"
#include "tsgof/garch.hpp"
#include "tsgof/optimize.hpp"
#include "tsgof/parallel.hpp"
#include "tsgof/polynomial.hpp"
#include "tsgof/quadrature.hpp"
#include "tsgof/random.hpp"
#include "tsgof/series.hpp"
