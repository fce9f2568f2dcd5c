#pragma once

#include <vector>

#include "mutforge/taxonomy.hpp"

namespace mutforge {

// Deterministically constructs the bundled 596-record reference dataset.
// All per-library marginals of every labeling dimension, the per-leaf sums of
// the constrained subcategory tables, and the root-cause x effort table are
// fixed; unconstrained leaf cells are filled as evenly as possible with the
// remainder going to the earliest leaf in declaration order.
std::vector<VulnRecord> reference_dataset();

}  // namespace mutforge
