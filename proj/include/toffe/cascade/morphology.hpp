#pragma once

#include "toffe/event/binning.hpp"
#include "toffe/event/grid.hpp"

namespace toffe {

/// Dilation then erosion by a k x k square. The grid is treated as zero
/// outside its bounds, so the result is extensive and idempotent. Throws
/// std::invalid_argument for even or non-positive k.
BinaryGrid close(const BinaryGrid& g, int k);

/// 1 - close(out, k).
BinaryGrid make_mask(const BinaryGrid& out, int k = 5);

/// Zeroes every bin and polarity count at pixels where the mask is 0.
BinnedVolume apply_mask(const BinnedVolume& input, const BinaryGrid& mask);

}  // namespace toffe
