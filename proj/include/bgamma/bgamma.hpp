#pragma once

// Umbrella header. The oracle and verification headers are left out because
// they need FFTW; include them directly.

#include "bgamma/analysis.hpp"
#include "bgamma/density.hpp"
#include "bgamma/density_batch.hpp"
#include "bgamma/distribution.hpp"
#include "bgamma/errors.hpp"
#include "bgamma/params.hpp"
#include "bgamma/policy.hpp"
#include "bgamma/rng.hpp"
#include "bgamma/simfit.hpp"
#include "bgamma/specfun/bessel.hpp"
#include "bgamma/specfun/constants.hpp"
#include "bgamma/specfun/expint.hpp"
#include "bgamma/specfun/gamma.hpp"
#include "bgamma/specfun/hypergeometric.hpp"
#include "bgamma/specfun/quadrature.hpp"
