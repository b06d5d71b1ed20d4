// Copyright 2026 The prunemi Authors
// SPDX-License-Identifier: Apache-2.0

#include "prunemi/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace prunemi {
namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string checkpoint_to_json(const MaskedMlp& net) {
  nlohmann::json j;
  j["format"] = "prunemi-checkpoint";
  j["version"] = kCheckpointVersion;
  j["layer_dims"] = net.layer_dims();
  j["seed"] = net.seed();
  j["output_clip"] = net.output_clip();
  j["params"] = to_std(net.params());
  j["init_snapshot"] = to_std(net.init_snapshot());
  j["mask"] = net.mask().bits;
  return j.dump();
}

MaskedMlp checkpoint_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("format", "") != "prunemi-checkpoint") {
    throw std::runtime_error("not a prunemi checkpoint");
  }
  const int version = j.at("version").get<int>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  return MaskedMlp::restore(j.at("layer_dims").get<std::vector<std::size_t>>(),
                            from_std(j.at("params").get<std::vector<double>>()),
                            j.at("mask").get<std::vector<std::uint8_t>>(),
                            from_std(j.at("init_snapshot").get<std::vector<double>>()),
                            j.at("seed").get<std::uint64_t>(), j.at("output_clip").get<bool>());
}

void save_checkpoint(const MaskedMlp& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << checkpoint_to_json(net) << '\n';
}

MaskedMlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_json(ss.str());
}

}  // namespace prunemi
