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

#pragma once

#include <cstdint>

namespace mvec {

// IEEE 754 binary16 conversions. Encoding rounds to nearest, ties to even.
std::uint16_t float_to_half(float value);
float half_to_float(std::uint16_t bits);

// Largest finite binary16 magnitude.
inline constexpr float kHalfMax = 65504.0f;

}  // namespace mvec
