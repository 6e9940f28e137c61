#ifndef BAMG_BAMG_HPP
#define BAMG_BAMG_HPP

// Two-level bootstrap AMG with algebraic-distance strength of connection,
// compatible-relaxation coarsening, and least-squares interpolation.

#include "bamg/core/cf_split.hpp"
#include "bamg/core/dense.hpp"
#include "bamg/core/galerkin.hpp"
#include "bamg/core/interp_operator.hpp"
#include "bamg/core/relaxation.hpp"
#include "bamg/core/rng.hpp"
#include "bamg/core/sparse_matrix.hpp"
#include "bamg/core/types.hpp"
#include "bamg/experiment/config.hpp"
#include "bamg/experiment/runner.hpp"
#include "bamg/io/matrix_market.hpp"
#include "bamg/problem/anisotropic.hpp"
#include "bamg/setup/cr_coarsen.hpp"
#include "bamg/setup/ls_fit.hpp"
#include "bamg/setup/ls_interp.hpp"
#include "bamg/setup/strength.hpp"
#include "bamg/setup/test_vectors.hpp"
#include "bamg/solver/two_grid.hpp"

#endif
