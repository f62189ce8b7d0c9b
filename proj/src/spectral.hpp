#pragma once

#include "qtm4f/model.hpp"

namespace qtm4f {

// Sort eigenpairs ascending (stable for ties) and apply the sign convention.
EigenSystem sorted_canonical(const RealVector4& values, const std::array<RealVector4, kDim>& vectors);

}  // namespace qtm4f
