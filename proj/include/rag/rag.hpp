#pragma once

// Umbrella header: pointwise surrogate forest, requirement-conditioned
// likelihood, and MH design generation over it.

#include "rag/csv.hpp"
#include "rag/dataset.hpp"
#include "rag/design_space.hpp"
#include "rag/forest.hpp"
#include "rag/json_io.hpp"
#include "rag/likelihood.hpp"
#include "rag/metrics.hpp"
#include "rag/models.hpp"
#include "rag/parallel.hpp"
#include "rag/query_grid.hpp"
#include "rag/requirements.hpp"
#include "rag/rng.hpp"
#include "rag/sampler.hpp"
