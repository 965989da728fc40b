#pragma once

// Umbrella header.

#include "data_matrix.hpp"
#include "datagen.hpp"
#include "dermatology.hpp"
#include "energy.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "ledger.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "random.hpp"
#include "report.hpp"
#include "solver.hpp"
#include "summation.hpp"
#include "validation.hpp"
