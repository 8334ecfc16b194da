#pragma once

#include "kds/coords.hpp"
#include "kds/metric.hpp"

namespace kt {

inline constexpr double kM0 = 0.1;
inline constexpr double kLambda = 3.0;

inline kds::BlackHoleParams params(double a = 0.0) { return kds::derive_params(kM0, kLambda, a); }

inline kds::TortoiseMap tortoise(double a = 0.0) {
    const auto p = params(a);
    return kds::build_tortoise(p, kds::default_anchor(p));
}

}  // namespace kt
