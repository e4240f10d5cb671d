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

#include "sketchvoice/archive.h"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <memory>

#include "sketchvoice/errors.h"

namespace sketchvoice {

namespace {

constexpr char kMagic[4] = {'S', 'K', 'V', 'A'};

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256 init failed");
    }
  }
  void update(const void* data, std::size_t size) {
    EVP_DigestUpdate(ctx_.get(), data, size);
  }
  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), digest, &len);
    static const char* kHex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[digest[i] >> 4];
      out += kHex[digest[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

void Archive::put(const std::string& name, const nn::Tensor& tensor) {
  put(name, tensor.shape(), tensor.values());
}

void Archive::put(const std::string& name, nn::Shape shape,
                  std::vector<float> values) {
  tensors_[name] = nn::Tensor::from(std::move(shape), std::move(values));
}

bool Archive::contains(const std::string& name) const {
  return tensors_.count(name) > 0;
}

const nn::Tensor& Archive::get(const std::string& name) const {
  const auto it = tensors_.find(name);
  if (it == tensors_.end()) throw IoError("archive has no tensor '" + name + "'");
  return it->second;
}

void Archive::write(const std::filesystem::path& path) const {
  nlohmann::json header;
  header["meta"] = meta_;
  header["tensors"] = nlohmann::json::array();
  for (const auto& [name, t] : tensors_) {
    header["tensors"].push_back({{"name", name}, {"shape", t.shape()}});
  }
  const std::string text = header.dump();
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(kMagic, 4);
    write_pod<std::uint32_t>(out, kFormatVersion);
    write_pod<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [name, t] : tensors_) {
      out.write(reinterpret_cast<const char*>(t.data().data()),
                static_cast<std::streamsize>(t.size() * sizeof(float)));
    }
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Archive Archive::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError(path.string() + " is not a sketchvoice archive");
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw IoError(path.string() + ": unsupported archive version " +
                  std::to_string(version));
  }
  const auto header_size = read_pod<std::uint64_t>(in);
  if (!in || header_size > (1ull << 30)) throw IoError(path.string() + ": bad header");
  std::string text(header_size, '\0');
  in.read(text.data(), static_cast<std::streamsize>(header_size));
  Archive archive;
  try {
    const auto header = nlohmann::json::parse(text);
    archive.meta_ = header.at("meta");
    for (const auto& entry : header.at("tensors")) {
      nn::Shape shape = entry.at("shape").get<nn::Shape>();
      std::vector<float> values(nn::shape_size(shape));
      in.read(reinterpret_cast<char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
      if (!in) throw IoError(path.string() + ": truncated tensor data");
      archive.put(entry.at("name").get<std::string>(), std::move(shape),
                  std::move(values));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return archive;
}

void store_module(Archive& archive, const std::string& prefix,
                  const nn::Module& module) {
  for (const auto& [name, p] : module.named_parameters()) {
    archive.put(prefix + name, p);
  }
}

void load_module(const Archive& archive, const std::string& prefix,
                 nn::Module& module) {
  for (auto& [name, p] : module.named_parameters()) {
    const nn::Tensor& src = archive.get(prefix + name);
    if (src.shape() != p.shape()) {
      throw IoError("parameter " + prefix + name + " has shape " +
                    nn::shape_string(src.shape()) + ", expected " +
                    nn::shape_string(p.shape()));
    }
    nn::Tensor target = p;
    std::copy(src.data().begin(), src.data().end(), target.mutable_data().begin());
  }
}

std::string parameter_hash(const nn::Module& module) {
  Sha256 sha;
  for (const auto& [name, p] : module.named_parameters()) {
    sha.update(name.data(), name.size());
    sha.update(p.shape().data(), p.shape().size() * sizeof(int));
    sha.update(p.data().data(), p.size() * sizeof(float));
  }
  return sha.hex();
}

std::string sha256_hex(const void* data, std::size_t size) {
  Sha256 sha;
  sha.update(data, size);
  return sha.hex();
}

}  // namespace sketchvoice
