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

#include "beekit/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "beekit/errors.hpp"

namespace beekit {

namespace {

constexpr char kMagic[4] = {'R', 'T', 'E', 'N'};

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

void append_u32le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

}  // namespace

std::int64_t RawTensor::element_count() const {
  std::int64_t n = 1;
  for (const int d : dims) n *= d;
  return dims.empty() ? 0 : n;
}

RawTensor parse_rten(const std::string& bytes) {
  if (bytes.size() < 8 ||
      std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError("not an RTEN container");
  }
  const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint32_t header_len = read_u32le(u + 4);
  if (bytes.size() < 8ull + header_len) {
    throw ParseError("RTEN header truncated");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(8, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("RTEN header is not valid JSON: ") +
                     e.what());
  }
  if (!header.is_object() || header.value("dtype", "") != "f32le" ||
      !header.contains("dims") || !header["dims"].is_array() ||
      !header.contains("layout")) {
    throw ParseError("RTEN header missing dtype/dims/layout");
  }

  RawTensor t;
  t.layout = header["layout"].get<std::string>();
  t.image_id = header.value("image_id", "");
  for (const auto& d : header["dims"]) {
    if (!d.is_number_integer() || d.get<std::int64_t>() < 1) {
      throw ParseError("RTEN dims must be positive integers");
    }
    t.dims.push_back(d.get<int>());
  }

  const std::int64_t count = t.element_count();
  const std::size_t payload_offset = 8 + header_len;
  if (bytes.size() - payload_offset !=
      static_cast<std::size_t>(count) * 4) {
    throw ParseError("RTEN payload size disagrees with dims (" +
                     std::to_string(bytes.size() - payload_offset) +
                     " bytes for " + std::to_string(count) + " values)");
  }

  t.values.resize(static_cast<std::size_t>(count));
  const unsigned char* p = u + payload_offset;
  for (std::int64_t i = 0; i < count; ++i, p += 4) {
    const float v = std::bit_cast<float>(read_u32le(p));
    if (!std::isfinite(v)) {
      throw ParseError("RTEN value " + std::to_string(i) + " is not finite");
    }
    t.values[static_cast<std::size_t>(i)] = v;
  }
  return t;
}

std::string serialize_rten(const RawTensor& tensor) {
  if (tensor.dims.empty()) throw ValidationError("tensor has no dims");
  for (const int d : tensor.dims) {
    if (d < 1) throw ValidationError("tensor dims must be positive");
  }
  if (tensor.element_count() !=
      static_cast<std::int64_t>(tensor.values.size())) {
    throw ValidationError("tensor value count disagrees with dims");
  }
  for (const float v : tensor.values) {
    if (!std::isfinite(v)) {
      throw ValidationError("tensor holds a non-finite value");
    }
  }

  nlohmann::json header;
  header["dtype"] = "f32le";
  header["dims"] = tensor.dims;
  header["layout"] = tensor.layout;
  header["image_id"] = tensor.image_id;
  const std::string header_text = header.dump();

  std::string out;
  out.reserve(8 + header_text.size() + tensor.values.size() * 4);
  out.append(kMagic, 4);
  append_u32le(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  for (const float v : tensor.values) {
    append_u32le(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

RawTensor read_rten(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_rten(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_rten(const RawTensor& tensor, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  const std::string bytes = serialize_rten(tensor);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace beekit
