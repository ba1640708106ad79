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

#include "beekit/format.hpp"

#include <charconv>
#include <cmath>

namespace beekit {

std::string format_fixed(double value, int places) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::fixed, places);
  return std::string(buf, res.ptr);
}

double round_half_up(double value, int places) {
  const double scale = std::pow(10.0, places);
  if (value >= 0.0) return std::floor(value * scale + 0.5) / scale;
  return -std::floor(-value * scale + 0.5) / scale;
}

}  // namespace beekit
