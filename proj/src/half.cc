// Copyright 2026 The mvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvec/half.h"

#include <bit>

namespace mvec {

std::uint16_t float_to_half(float value) {
    const std::uint32_t f = std::bit_cast<std::uint32_t>(value);
    const std::uint16_t sign = static_cast<std::uint16_t>((f >> 16) & 0x8000u);
    const std::uint32_t exponent = (f >> 23) & 0xffu;
    std::uint32_t mantissa = f & 0x7fffffu;

    if (exponent == 0xffu) {
        // inf stays inf; NaN keeps a quiet payload bit
        return static_cast<std::uint16_t>(sign | 0x7c00u | (mantissa ? 0x200u : 0u));
    }

    const int unbiased = static_cast<int>(exponent) - 127;
    if (unbiased > 15) {
        return static_cast<std::uint16_t>(sign | 0x7c00u);
    }

    if (unbiased >= -14) {
        // normal range: keep 10 mantissa bits, round the dropped 13
        std::uint32_t half_exp = static_cast<std::uint32_t>(unbiased + 15);
        std::uint32_t half_man = mantissa >> 13;
        const std::uint32_t rest = mantissa & 0x1fffu;
        if (rest > 0x1000u || (rest == 0x1000u && (half_man & 1u))) {
            ++half_man;
            if (half_man == 0x400u) {
                half_man = 0;
                ++half_exp;
            }
        }
        if (half_exp >= 0x1fu) {
            return static_cast<std::uint16_t>(sign | 0x7c00u);
        }
        return static_cast<std::uint16_t>(sign | (half_exp << 10) | half_man);
    }

    // subnormal half (or underflow to zero)
    if (unbiased < -25) {
        return sign;
    }
    mantissa |= 0x800000u;  // implicit leading one
    const int shift = -unbiased - 1;  // 14..24 -> total shift of 24 bits window
    const std::uint32_t total_shift = static_cast<std::uint32_t>(shift);
    std::uint32_t half_man = mantissa >> total_shift;
    const std::uint32_t rest = mantissa & ((1u << total_shift) - 1u);
    const std::uint32_t halfway = 1u << (total_shift - 1u);
    if (rest > halfway || (rest == halfway && (half_man & 1u))) {
        ++half_man;  // may carry into the smallest normal, which is the right encoding
    }
    return static_cast<std::uint16_t>(sign | half_man);
}

float half_to_float(std::uint16_t bits) {
    const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
    const std::uint32_t exponent = (bits >> 10) & 0x1fu;
    std::uint32_t mantissa = bits & 0x3ffu;

    std::uint32_t out;
    if (exponent == 0x1fu) {
        out = sign | 0x7f800000u | (mantissa << 13);
    } else if (exponent != 0) {
        out = sign | ((exponent + 112u) << 23) | (mantissa << 13);
    } else if (mantissa == 0) {
        out = sign;
    } else {
        // normalize the subnormal
        int e = -1;
        do {
            ++e;
            mantissa <<= 1;
        } while ((mantissa & 0x400u) == 0);
        out = sign | (static_cast<std::uint32_t>(112 - e) << 23) | ((mantissa & 0x3ffu) << 13);
    }
    return std::bit_cast<float>(out);
}

}  // namespace mvec
