#pragma once

#include "cot/cost.hpp"
#include "cot/density.hpp"
#include "cot/errors.hpp"
#include "cot/exact_maps.hpp"
#include "cot/functionals.hpp"
#include "cot/kantorovich.hpp"
#include "cot/legendre.hpp"
#include "cot/numerics.hpp"
#include "cot/transport_ops.hpp"
