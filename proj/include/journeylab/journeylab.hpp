#pragma once

#include "journeylab/dataset.hpp"
#include "journeylab/embedding.hpp"
#include "journeylab/error.hpp"
#include "journeylab/evaluator.hpp"
#include "journeylab/planner.hpp"
#include "journeylab/rng.hpp"
#include "journeylab/score_table.hpp"
#include "journeylab/simulator.hpp"
#include "journeylab/sweep.hpp"
#include "journeylab/synthetic.hpp"
#include "journeylab/trial.hpp"

namespace journeylab {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace journeylab
