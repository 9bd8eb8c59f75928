#pragma once

#include "latgf/asymptotics.hpp"
#include "latgf/bump.hpp"
#include "latgf/constants.hpp"
#include "latgf/core.hpp"
#include "latgf/lattice.hpp"
#include "latgf/model.hpp"
#include "latgf/oracles.hpp"
#include "latgf/pipeline.hpp"
#include "latgf/quadrature.hpp"
#include "latgf/symbols.hpp"
#include "latgf/transform.hpp"
