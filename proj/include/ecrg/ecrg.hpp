#pragma once

// Umbrella header for the full library.

#include "container.hpp"
#include "errors.hpp"
#include "gf.hpp"
#include "matrix.hpp"
#include "mbr.hpp"
#include "msr.hpp"
#include "node_oracle.hpp"
#include "rs.hpp"
#include "sim.hpp"
