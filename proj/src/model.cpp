// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/model.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ems {

namespace {

constexpr std::array<char, 8> kMagic = {'E', 'M', 'S', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in, const std::string& source) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) throw Error(source + ": truncated checkpoint");
  return value;
}

}  // namespace

void write_checkpoint(const ModelParamsd& params, std::ostream& out) {
  if (!params.all_finite()) throw Error("refusing to write a checkpoint with non-finite parameters");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.num_classes()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.feature_dim()));
  for (Eigen::Index r = 0; r < params.weight.rows(); ++r)
    for (Eigen::Index c = 0; c < params.weight.cols(); ++c) put<double>(out, params.weight(r, c));
  for (Eigen::Index r = 0; r < params.bias.size(); ++r) put<double>(out, params.bias[r]);
}

ModelParamsd read_checkpoint(std::istream& in, const std::string& source) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error(source + ": not an EMS checkpoint");
  const auto version = get<std::uint32_t>(in, source);
  if (version != kVersion) throw Error(source + ": unsupported checkpoint version " + std::to_string(version));
  const auto num_classes = get<std::uint32_t>(in, source);
  const auto dim = get<std::uint32_t>(in, source);
  if (num_classes == 0) throw Error(source + ": checkpoint with zero classes");
  ModelParamsd params = ModelParamsd::zeros(static_cast<int>(num_classes), static_cast<int>(dim));
  for (Eigen::Index r = 0; r < params.weight.rows(); ++r)
    for (Eigen::Index c = 0; c < params.weight.cols(); ++c) params.weight(r, c) = get<double>(in, source);
  for (Eigen::Index r = 0; r < params.bias.size(); ++r) params.bias[r] = get<double>(in, source);
  if (!params.all_finite()) throw Error(source + ": checkpoint contains non-finite parameters");
  return params;
}

std::string checkpoint_bytes(const ModelParamsd& params) {
  std::ostringstream out(std::ios::binary);
  write_checkpoint(params, out);
  return out.str();
}

void save_checkpoint(const ModelParamsd& params, const std::filesystem::path& path, const std::string& metadata_json) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_checkpoint(params, out);
  }
  std::filesystem::path sidecar = path;
  sidecar += ".meta.json";
  std::ofstream meta(sidecar, std::ios::binary);
  if (!meta) throw Error("cannot open " + sidecar.string() + " for writing");
  meta << metadata_json << '\n';
}

ModelParamsd load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in, path.string());
}

}  // namespace ems
