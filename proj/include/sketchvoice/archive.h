// Copyright 2026 The Sketchvoice Authors
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

#ifndef SKETCHVOICE_ARCHIVE_H_
#define SKETCHVOICE_ARCHIVE_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sketchvoice/nn/module.h"
#include "sketchvoice/nn/tensor.h"

namespace sketchvoice {

// Single-file container of named float tensors plus a JSON header. Layout:
// "SKVA", u32 format version, u64 header length, header JSON, then the
// tensors as little-endian float32 in header order.
class Archive {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  nlohmann::json& meta() { return meta_; }
  const nlohmann::json& meta() const { return meta_; }

  void put(const std::string& name, const nn::Tensor& tensor);
  void put(const std::string& name, nn::Shape shape, std::vector<float> values);
  bool contains(const std::string& name) const;
  // Throws IoError when absent.
  const nn::Tensor& get(const std::string& name) const;
  const std::map<std::string, nn::Tensor>& tensors() const { return tensors_; }

  // Writes to a temporary sibling and renames, so readers never see a
  // partial file.
  void write(const std::filesystem::path& path) const;
  static Archive read(const std::filesystem::path& path);

 private:
  nlohmann::json meta_ = nlohmann::json::object();
  std::map<std::string, nn::Tensor> tensors_;
};

// Copies every parameter of `module` into the archive under prefix + name.
void store_module(Archive& archive, const std::string& prefix,
                  const nn::Module& module);
// Loads parameters by name; throws IoError on a missing name or a shape
// mismatch.
void load_module(const Archive& archive, const std::string& prefix,
                 nn::Module& module);

// Hex SHA-256 over parameter names, shapes and values.
std::string parameter_hash(const nn::Module& module);
std::string sha256_hex(const void* data, std::size_t size);

}  // namespace sketchvoice

#endif  // SKETCHVOICE_ARCHIVE_H_
