#pragma once

// Umbrella header for the whole engine.

#include "cylfi/check.hpp"
#include "cylfi/distribution.hpp"
#include "cylfi/errors.hpp"
#include "cylfi/gaussian.hpp"
#include "cylfi/kernels.hpp"
#include "cylfi/model.hpp"
#include "cylfi/moments.hpp"
#include "cylfi/oracle.hpp"
#include "cylfi/polyparse.hpp"
#include "cylfi/polytensor.hpp"
#include "cylfi/serialize.hpp"
#include "cylfi/sqrtdet.hpp"
