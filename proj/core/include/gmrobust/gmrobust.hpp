#pragma once

#include "gmrobust/attacks.hpp"
#include "gmrobust/errors.hpp"
#include "gmrobust/estimator.hpp"
#include "gmrobust/experiments.hpp"
#include "gmrobust/model_io.hpp"
#include "gmrobust/network.hpp"
#include "gmrobust/parallel.hpp"
#include "gmrobust/pgm.hpp"
#include "gmrobust/rng.hpp"
#include "gmrobust/tensor.hpp"
#include "gmrobust/verifier.hpp"
