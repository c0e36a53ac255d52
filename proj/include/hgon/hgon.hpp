#pragma once

#include "hgon/combinatorics.hpp"
#include "hgon/error.hpp"
#include "hgon/estimator.hpp"
#include "hgon/hypergraphon.hpp"
#include "hgon/kmeans.hpp"
#include "hgon/metrics.hpp"
#include "hgon/prediction.hpp"
#include "hgon/rng.hpp"
#include "hgon/tensor.hpp"
#include "hgon/tensor_io.hpp"
