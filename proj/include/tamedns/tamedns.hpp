#pragma once

// Pseudo-spectral solver for tamed incompressible Navier-Stokes on the
// periodic box [0, 2*pi)^3, with the diagnostics used to audit its energy
// budget, a priori bounds, and convergence toward the untamed dynamics.

#include "tamedns/analysis.hpp"
#include "tamedns/checkpoint.hpp"
#include "tamedns/config.hpp"
#include "tamedns/diagnostics.hpp"
#include "tamedns/dynamics.hpp"
#include "tamedns/experiment.hpp"
#include "tamedns/fft.hpp"
#include "tamedns/field.hpp"
#include "tamedns/forcing.hpp"
#include "tamedns/grid.hpp"
#include "tamedns/integrator.hpp"
#include "tamedns/output.hpp"
#include "tamedns/scenarios.hpp"
#include "tamedns/taming.hpp"
