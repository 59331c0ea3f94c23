#pragma once

#include "qelim/rational.hpp"
#include "qelim/term.hpp"
#include "qelim/formula.hpp"
#include "qelim/io.hpp"
#include "qelim/budget.hpp"
#include "qelim/simplex.hpp"
#include "qelim/polyhedra.hpp"
#include "qelim/sat_solver.hpp"
#include "qelim/smt.hpp"
#include "qelim/qe.hpp"
#include "qelim/lw.hpp"
#include "qelim/generator.hpp"
#include "qelim/bench.hpp"
