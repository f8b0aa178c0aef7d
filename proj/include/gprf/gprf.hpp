#pragma once

// Umbrella header for the GPRF library: local Gaussian processes coupled by
// pairwise potentials as a tractable surrogate for the full GP marginal
// likelihood, plus exact-GP and committee-machine baselines, MAP fitting of
// latent inputs, and reproducible synthetic data generators.

#include "gprf/common.hpp"
#include "gprf/rng.hpp"
#include "gprf/kernels.hpp"
#include "gprf/blocks.hpp"
#include "gprf/gaussian.hpp"
#include "gprf/objective.hpp"
#include "gprf/full_gp.hpp"
#include "gprf/bcm.hpp"
#include "gprf/mapfit.hpp"
#include "gprf/datagen.hpp"
#include "gprf/io.hpp"
