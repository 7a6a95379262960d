#pragma once

#include <cstdint>

#include "bspn/dataio.hpp"
#include "bspn/graph.hpp"
#include "bspn/model.hpp"
#include "bspn/params.hpp"

namespace fixture {

// Root sum with weights (0.6, 0.3, 0.1) over three products of two binary
// categorical leaves; at x = (1, 1) the six leaf values are
// (.35, .2), (.4, .15), (.1, .2) and the density is 0.062.
bspn::SpnGraph fig1_graph();
bspn::MaterializedParams fig1_params();

// D = 2, C_s = 2, C_p = 2 Gaussian model with a distinct prior per leaf and
// four data points; small enough to enumerate the collapsed posterior.
bspn::Model toy_model();
bspn::DataMatrix toy_data(std::size_t points = 4);

// Gaussian-mixture columns with `clusters` well separated centres.
bspn::DataMatrix gaussian_clusters(std::size_t n, std::size_t dims, std::size_t clusters, std::uint64_t seed);

// Two latent classes over four columns of kinds continuous, positive, count,
// categorical(3).
bspn::Dataset heterogeneous(std::size_t n, std::uint64_t seed);

// Two-armed noisy spiral in the plane.
bspn::DataMatrix spiral(std::size_t n, std::uint64_t seed);

}  // namespace fixture
