#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "soqn/model.hpp"
#include "soqn/rmfs.hpp"

namespace soqn {

/// Parsed model file (JSON, schema version 1). A file carries either an
/// explicit network (nodes + routing + resources + arrival_rate), a
/// warehouse parameter block ("rmfs"), or both.
struct ModelFile {
  int schema = 1;
  std::optional<SoqnModel> network;
  std::optional<RmfsParams> rmfs;
  std::optional<int> resources;  // top-level override for rmfs-built models

  /// The network to analyse: the explicit one if present, otherwise the
  /// warehouse built at the requested fleet size. Throws ValidationError
  /// when neither is possible.
  SoqnModel resolve_network(std::optional<int> resources_override = {}) const;
};

ModelFile parse_model_file(const std::string& json_text);
ModelFile load_model_file(const std::filesystem::path& path);

/// Full model-file JSON for a network; doubles print with shortest
/// round-trip precision, so parse(serialize(m)) == m field for field.
std::string serialize(const SoqnModel& model);
std::string serialize(const RmfsParams& params);

}  // namespace soqn
