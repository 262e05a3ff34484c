#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "sdfl/errors.hpp"
#include "sdfl/scenario.hpp"

namespace sdfl {

/// Crowd score awarded to an arrival that finds the queue at length k
/// (including themselves). Constant at `a` while k stays below the queue
/// strength; beyond it the score decays linearly (a - b*(k - gamma)) or
/// exponentially (a - b*(gamma + e^{(k - 2*gamma)/4})). May go negative
/// unless params.clamp floors it at zero.
inline double sd_value(std::int64_t k, const SdParams& params, int type = 0, int zone = 0) {
    if (k < 0) throw DomainError("sd_value: k must be nonnegative");
    const int gamma = params.gamma_for(type, zone);
    double v;
    if (k < gamma) {
        v = params.a;
    } else if (params.mode == SdMode::linear) {
        v = params.a - params.b * static_cast<double>(k - gamma);
    } else {
        v = params.a -
            params.b * (gamma + std::exp(static_cast<double>(k - 2 * gamma) / 4.0));
    }
    return params.clamp ? std::max(v, 0.0) : v;
}

} // namespace sdfl
