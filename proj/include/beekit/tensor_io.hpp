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

// Self-describing tensor container: magic "RTEN", little-endian u32 header
// length, JSON header {"dtype":"f32le","dims":[...],"layout":"...",
// "image_id":"..."}, then the packed row-major f32le payload.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace beekit {

struct RawTensor {
  std::vector<int> dims;
  std::string layout;  // "A,H,W,C", "P,4", or "P,C"
  std::string image_id;
  std::vector<float> values;  // row-major

  std::int64_t element_count() const;
};

// Both directions validate: magic, dims/payload agreement, finite values.
RawTensor parse_rten(const std::string& bytes);
std::string serialize_rten(const RawTensor& tensor);

RawTensor read_rten(const std::filesystem::path& path);
void write_rten(const RawTensor& tensor, const std::filesystem::path& path);

}  // namespace beekit
