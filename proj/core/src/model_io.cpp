#include "soqn/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "soqn/errors.hpp"

namespace soqn {

namespace {

using nlohmann::ordered_json;

double number_at(const ordered_json& obj, const std::string& key) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw ValidationError("missing or non-numeric field: " + key);
  }
  return obj.at(key).get<double>();
}

double number_or(const ordered_json& obj, const std::string& key,
                 double fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  if (!obj.at(key).is_number()) {
    throw ValidationError("non-numeric field: " + key);
  }
  return obj.at(key).get<double>();
}

RateFunction parse_rate(const ordered_json& spec, const std::string& node_id) {
  const std::string kind = spec.value("kind", "");
  if (kind == "constant") {
    return RateFunction::constant(number_at(spec, "base_rate"));
  }
  if (kind == "infinite-server") {
    return RateFunction::infinite_server(number_at(spec, "base_rate"));
  }
  if (kind == "table") {
    if (!spec.contains("table") || !spec.at("table").is_array()) {
      throw ValidationError("node " + node_id + ": table rate needs a table");
    }
    std::vector<double> rates;
    for (const auto& entry : spec.at("table")) {
      if (!entry.is_number()) {
        throw ValidationError("node " + node_id + ": non-numeric table entry");
      }
      rates.push_back(entry.get<double>());
    }
    return RateFunction::table(std::move(rates));
  }
  throw ValidationError("node " + node_id + ": unknown rate kind '" + kind +
                        "'");
}

Discipline parse_discipline(const std::string& text,
                            const std::string& node_id) {
  if (text == "fcfs-single-server") return Discipline::FcfsSingleServer;
  if (text == "processor-sharing") return Discipline::ProcessorSharing;
  throw ValidationError("node " + node_id + ": unknown discipline '" + text +
                        "'");
}

SoqnModel parse_network(const ordered_json& root) {
  SoqnModel model;
  model.arrival_rate = number_at(root, "arrival_rate");
  model.resources = static_cast<int>(number_at(root, "resources"));

  if (!root.contains("nodes") || !root.at("nodes").is_array() ||
      root.at("nodes").empty()) {
    throw ValidationError("model file needs a non-empty nodes array");
  }
  std::vector<std::string> ids{"0"};
  for (const auto& entry : root.at("nodes")) {
    Node node;
    node.id = entry.value("id", "");
    if (node.id.empty()) {
      throw ValidationError("every node needs a non-empty id");
    }
    node.discipline =
        parse_discipline(entry.value("discipline", "fcfs-single-server"),
                         node.id);
    if (!entry.contains("rate")) {
      throw ValidationError("node " + node.id + ": missing rate");
    }
    node.rate = parse_rate(entry.at("rate"), node.id);
    ids.push_back(node.id);
    model.inner.push_back(std::move(node));
  }

  const int nodes = model.inner_count() + 1;
  if (!root.contains("routing")) {
    throw ValidationError("model file needs a routing section");
  }
  const auto& routing = root.at("routing");
  RoutingMatrix matrix(nodes);

  if (routing.contains("dense")) {
    const auto& rows = routing.at("dense");
    if (!rows.is_array() || static_cast<int>(rows.size()) != nodes) {
      throw ValidationError("dense routing must have one row per node (" +
                            std::to_string(nodes) + " including the pool)");
    }
    for (int i = 0; i < nodes; ++i) {
      const auto& row = rows.at(i);
      if (!row.is_array() || static_cast<int>(row.size()) != nodes) {
        throw ValidationError("dense routing row " + std::to_string(i) +
                              " has the wrong length");
      }
      for (int j = 0; j < nodes; ++j) {
        if (!row.at(j).is_number()) {
          throw ValidationError("routing entry (" + std::to_string(i) + "," +
                                std::to_string(j) + ") is not a number");
        }
        matrix(i, j) = row.at(j).get<double>();
      }
    }
  } else if (routing.contains("sparse")) {
    auto index_of = [&](const ordered_json& ref) {
      if (ref.is_number_integer()) {
        const int idx = ref.get<int>();
        if (idx < 0 || idx >= nodes) {
          throw ValidationError("routing refers to node index " +
                                std::to_string(idx));
        }
        return idx;
      }
      const std::string id = ref.get<std::string>();
      if (id == "pool") return 0;
      for (int i = 0; i < nodes; ++i) {
        if (ids[i] == id) return i;
      }
      throw ValidationError("routing refers to unknown node '" + id + "'");
    };
    for (const auto& triple : routing.at("sparse")) {
      if (!triple.is_array() || triple.size() != 3) {
        throw ValidationError("sparse routing entries are [from, to, p]");
      }
      matrix(index_of(triple.at(0)), index_of(triple.at(1))) =
          triple.at(2).get<double>();
    }
  } else {
    throw ValidationError("routing needs a dense matrix or sparse triples");
  }

  model.routing = matrix;
  return validate_model(model);
}

RmfsParams parse_rmfs(const ordered_json& block) {
  RmfsParams params;
  params.lambda_co = number_at(block, "lambda_co");
  params.sigma_pod_per_order = number_or(block, "sigma_pod_per_order", 1.0);
  params.w_alg = number_or(block, "w_alg", 0.0);
  params.w_assembled = number_or(block, "w_assembled", 0.0);

  auto rate_from_time = [&](const std::string& key) {
    const double mean = number_at(block, key);
    if (!(mean > 0.0)) {
      throw ValidationError(key + " must be a positive mean time");
    }
    return 1.0 / mean;
  };
  params.mu_sp = rate_from_time("mean_travel_sp");
  params.mu_pp1 = rate_from_time("mean_travel_pp1");
  params.mu_pp2 = rate_from_time("mean_travel_pp2");
  params.mu_p1s = rate_from_time("mean_travel_p1s");
  params.mu_p2s = rate_from_time("mean_travel_p2s");
  params.mu_p1r = rate_from_time("mean_travel_p1r");
  params.mu_p2r = rate_from_time("mean_travel_p2r");
  params.mu_rs = rate_from_time("mean_travel_rs");
  params.nu_p1 = rate_from_time("mean_pick_p1");
  params.nu_p2 = rate_from_time("mean_pick_p2");
  params.nu_r = rate_from_time("mean_replenish");

  params.q_pp1 = number_or(block, "q_pp1", 0.5);
  params.q_pp2 = number_or(block, "q_pp2", 0.5);
  params.q_p1s = number_or(block, "q_p1s", 0.8);
  params.q_p1r = number_or(block, "q_p1r", 0.2);
  params.q_p2s = number_or(block, "q_p2s", 0.8);
  params.q_p2r = number_or(block, "q_p2r", 0.2);
  params.n_max = static_cast<int>(number_or(block, "n_max", 550));
  params.to_task_max = number_or(
      block, "to_task_max", std::numeric_limits<double>::infinity());
  validate_params(params);
  return params;
}

ordered_json rate_to_json(const RateFunction& rate) {
  ordered_json spec;
  switch (rate.kind()) {
    case RateKind::Constant:
      spec["kind"] = "constant";
      spec["base_rate"] = rate.base_rate();
      break;
    case RateKind::InfiniteServer:
      spec["kind"] = "infinite-server";
      spec["base_rate"] = rate.base_rate();
      break;
    case RateKind::Table:
      spec["kind"] = "table";
      spec["table"] = rate.table_rates();
      break;
  }
  return spec;
}

}  // namespace

SoqnModel ModelFile::resolve_network(
    std::optional<int> resources_override) const {
  if (network) {
    SoqnModel model = *network;
    if (resources_override) model.resources = *resources_override;
    return validate_model(model);
  }
  if (rmfs) {
    const std::optional<int> robots =
        resources_override ? resources_override : resources;
    if (!robots) {
      throw ValidationError(
          "a warehouse file needs a fleet size: add \"resources\" or pass "
          "--robots");
    }
    return build_rmfs_model(*rmfs, *robots);
  }
  throw ValidationError("model file carries neither a network nor rmfs block");
}

ModelFile parse_model_file(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& err) {
    throw ValidationError(std::string("model file is not valid JSON: ") +
                          err.what());
  }

  try {
    ModelFile file;
    file.schema = static_cast<int>(number_or(root, "schema", 1));
    if (file.schema != 1) {
      throw ValidationError("unsupported schema version " +
                            std::to_string(file.schema));
    }
    if (root.contains("rmfs")) {
      file.rmfs = parse_rmfs(root.at("rmfs"));
      if (root.contains("resources")) {
        file.resources = static_cast<int>(number_at(root, "resources"));
      }
    }
    if (root.contains("nodes")) {
      file.network = parse_network(root);
    }
    if (!file.network && !file.rmfs) {
      throw ValidationError(
          "model file carries neither a network nor rmfs block");
    }
    return file;
  } catch (const nlohmann::json::exception& err) {
    throw ValidationError(std::string("malformed model file: ") + err.what());
  }
}

ModelFile load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open model file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model_file(buffer.str());
}

std::string serialize(const SoqnModel& model) {
  ordered_json root;
  root["schema"] = 1;
  root["arrival_rate"] = model.arrival_rate;
  root["resources"] = model.resources;
  root["nodes"] = ordered_json::array();
  for (const Node& node : model.inner) {
    ordered_json entry;
    entry["id"] = node.id;
    entry["discipline"] = node.discipline == Discipline::FcfsSingleServer
                              ? "fcfs-single-server"
                              : "processor-sharing";
    entry["rate"] = rate_to_json(node.rate);
    root["nodes"].push_back(std::move(entry));
  }
  const int nodes = model.inner_count() + 1;
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < nodes; ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < nodes; ++j) row.push_back(model.routing(i, j));
    rows.push_back(std::move(row));
  }
  root["routing"]["dense"] = std::move(rows);
  return root.dump(2) + "\n";
}

std::string serialize(const RmfsParams& params) {
  ordered_json block;
  block["lambda_co"] = params.lambda_co;
  block["sigma_pod_per_order"] = params.sigma_pod_per_order;
  block["w_alg"] = params.w_alg;
  block["w_assembled"] = params.w_assembled;
  block["mean_travel_sp"] = 1.0 / params.mu_sp;
  block["mean_travel_pp1"] = 1.0 / params.mu_pp1;
  block["mean_travel_pp2"] = 1.0 / params.mu_pp2;
  block["mean_travel_p1s"] = 1.0 / params.mu_p1s;
  block["mean_travel_p2s"] = 1.0 / params.mu_p2s;
  block["mean_travel_p1r"] = 1.0 / params.mu_p1r;
  block["mean_travel_p2r"] = 1.0 / params.mu_p2r;
  block["mean_travel_rs"] = 1.0 / params.mu_rs;
  block["mean_pick_p1"] = 1.0 / params.nu_p1;
  block["mean_pick_p2"] = 1.0 / params.nu_p2;
  block["mean_replenish"] = 1.0 / params.nu_r;
  block["q_pp1"] = params.q_pp1;
  block["q_pp2"] = params.q_pp2;
  block["q_p1s"] = params.q_p1s;
  block["q_p1r"] = params.q_p1r;
  block["q_p2s"] = params.q_p2s;
  block["q_p2r"] = params.q_p2r;
  block["n_max"] = params.n_max;
  if (std::isfinite(params.to_task_max)) {
    block["to_task_max"] = params.to_task_max;
  }

  ordered_json root;
  root["schema"] = 1;
  root["rmfs"] = std::move(block);
  return root.dump(2) + "\n";
}

}  // namespace soqn
