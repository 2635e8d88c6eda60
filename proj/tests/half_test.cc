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

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "mvec/half.h"

namespace {

// Decodes binary16 straight from the definition, independent of half_to_float.
double decode_half_reference(std::uint16_t bits) {
    const int sign = (bits >> 15) ? -1 : 1;
    const int exponent = (bits >> 10) & 0x1f;
    const int mantissa = bits & 0x3ff;
    if (exponent == 0) return sign * std::ldexp(mantissa, -24);
    if (exponent == 31) return mantissa ? std::nan("") : sign * INFINITY;
    return sign * std::ldexp(1024 + mantissa, exponent - 25);
}

// Table of every non-negative finite half, ascending; the nearest entry (ties to the even
// bit pattern) is the correctly rounded encoding.
struct HalfTable {
    std::vector<std::pair<double, std::uint16_t>> entries;

    HalfTable() {
        for (std::uint32_t b = 0; b < 0x7c00; ++b) {
            entries.emplace_back(decode_half_reference(static_cast<std::uint16_t>(b)), static_cast<std::uint16_t>(b));
        }
    }

    std::uint16_t nearest(float x) const {
        const double a = std::fabs(static_cast<double>(x));
        const std::uint16_t sign = std::signbit(x) ? 0x8000 : 0;
        // beyond max + half an ulp rounds to infinity
        if (a >= 65520.0) return sign | 0x7c00;
        auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(a, std::uint16_t{0}));
        if (it == entries.end()) return sign | 0x7bff;
        if (it->first == a || it == entries.begin()) return sign | it->second;
        auto lo = std::prev(it);
        const double dlo = a - lo->first;
        const double dhi = it->first - a;
        if (dlo < dhi) return sign | lo->second;
        if (dhi < dlo) return sign | it->second;
        return sign | ((lo->second & 1) == 0 ? lo->second : it->second);
    }
};

const HalfTable& table() {
    static const HalfTable t;
    return t;
}

TEST(Half, DecodeMatchesReferenceForEveryPattern) {
    for (std::uint32_t b = 0; b <= 0xffff; ++b) {
        const auto bits = static_cast<std::uint16_t>(b);
        const double ref = decode_half_reference(bits);
        const float got = mvec::half_to_float(bits);
        if (std::isnan(ref)) {
            EXPECT_TRUE(std::isnan(got)) << b;
        } else {
            EXPECT_EQ(static_cast<double>(got), ref) << b;
        }
    }
}

TEST(Half, EncodeMatchesNearestTableEntry) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> unit(-1.0f, 1.0f);
    std::uniform_real_distribution<float> wide(-70000.0f, 70000.0f);
    for (int i = 0; i < 200000; ++i) {
        const float x = (i % 2) ? unit(rng) : wide(rng);
        ASSERT_EQ(mvec::float_to_half(x), table().nearest(x)) << x;
    }
    // tiny magnitudes exercise subnormal rounding
    std::uniform_real_distribution<float> tiny(-1e-4f, 1e-4f);
    for (int i = 0; i < 100000; ++i) {
        const float x = tiny(rng);
        ASSERT_EQ(mvec::float_to_half(x), table().nearest(x)) << x;
    }
}

TEST(Half, ExactHalvesAndMidpoints) {
    for (std::uint32_t b = 0; b < 0x7bff; ++b) {
        const double v = decode_half_reference(static_cast<std::uint16_t>(b));
        const double next = decode_half_reference(static_cast<std::uint16_t>(b + 1));
        EXPECT_EQ(mvec::float_to_half(static_cast<float>(v)), b);
        const double mid = 0.5 * (v + next);
        const auto midf = static_cast<float>(mid);
        if (static_cast<double>(midf) == mid) {
            EXPECT_EQ(mvec::float_to_half(midf), (b & 1) ? b + 1 : b) << "midpoint after " << b;
        }
    }
}

TEST(Half, SpecialValues) {
    EXPECT_EQ(mvec::float_to_half(0.0f), 0x0000);
    EXPECT_EQ(mvec::float_to_half(-0.0f), 0x8000);
    EXPECT_EQ(mvec::float_to_half(INFINITY), 0x7c00);
    EXPECT_EQ(mvec::float_to_half(-INFINITY), 0xfc00);
    EXPECT_EQ(mvec::float_to_half(65504.0f), 0x7bff);
    EXPECT_EQ(mvec::float_to_half(65520.0f), 0x7c00);
    EXPECT_TRUE(std::isnan(mvec::half_to_float(mvec::float_to_half(NAN))));
}

}  // namespace
