// Copyright 2026 The Beekit Authors
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

#include <string>

namespace beekit {

/// Canonical fixed-point rendering: `places` decimals, '.' separator, no
/// locale. All numeric columns in text outputs go through this so golden
/// files stay byte-stable.
std::string format_fixed(double value, int places);

/// Rounds half away from zero at `places` decimals. Display tables use
/// 3 places; 0.8335 renders as 0.834.
double round_half_up(double value, int places);

}  // namespace beekit
