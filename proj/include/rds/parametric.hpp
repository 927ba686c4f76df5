#pragma once

#include "rds/chain.hpp"
#include "rds/conditionals.hpp"
#include "rds/dynamics.hpp"
#include "rds/trace.hpp"

#include <cstdint>

namespace rds {

/// Gaussian-noise baseline: one precision lambda ~ Gamma(a, b), every
/// observation pinned to component 1.
ChainTrace run_param(const TimeSeriesDataset& data, const PriorSpec& prior, const SamplerSettings& settings,
                     std::uint64_t seed);

}  // namespace rds
