#pragma once

#include "fnls/blowup.hpp"
#include "fnls/catalog.hpp"
#include "fnls/checkpoint.hpp"
#include "fnls/diagnostics.hpp"
#include "fnls/field.hpp"
#include "fnls/functionals.hpp"
#include "fnls/grid.hpp"
#include "fnls/ground_state.hpp"
#include "fnls/initial_data.hpp"
#include "fnls/integrator.hpp"
#include "fnls/scenarios.hpp"
#include "fnls/spectral.hpp"
