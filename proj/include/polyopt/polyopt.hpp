#pragma once

#include "polyopt/alloc/recycle.hpp"
#include "polyopt/core/count.hpp"
#include "polyopt/core/evaluate.hpp"
#include "polyopt/core/expand.hpp"
#include "polyopt/core/program_ops.hpp"
#include "polyopt/driver/cli.hpp"
#include "polyopt/driver/optimize.hpp"
#include "polyopt/driver/resultant.hpp"
#include "polyopt/driver/scatter.hpp"
#include "polyopt/driver/settings.hpp"
#include "polyopt/driver/shift.hpp"
#include "polyopt/frontend/emitter.hpp"
#include "polyopt/frontend/input_file.hpp"
#include "polyopt/frontend/parser.hpp"
#include "polyopt/horner/scheme.hpp"
#include "polyopt/mcts/search.hpp"
#include "polyopt/simplify/cse.hpp"
#include "polyopt/simplify/greedy.hpp"
#include "polyopt/simplify/merge.hpp"
