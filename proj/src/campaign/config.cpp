// SPDX-License-Identifier: Apache-2.0
#include "faultfs/campaign/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "faultfs/campaign/schema.hpp"

namespace faultfs::campaign {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "\n") + s;
  return out;
}

std::vector<Argv> argv_list(const json& j) {
  std::vector<Argv> out;
  for (const auto& a : j) out.push_back(a.get<Argv>());
  return out;
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> diagnostics)
    : ConfigError("configuration does not match the schema:\n" + join(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

std::string default_workdir_root() {
  const char* env = std::getenv("FAULTFS_WORKDIR");
  return env && *env ? std::string(env) : (fs::current_path() / "faultfs-work").string();
}

CampaignConfig parse_config(const json& doc, const std::string& config_dir) {
  auto errors = validate_against(campaign_schema(), doc);
  if (!errors.empty()) throw SchemaError(std::move(errors));

  CampaignConfig c;
  c.config_dir = fs::absolute(config_dir.empty() ? "." : config_dir).lexically_normal().string();
  c.name = doc.value("name", c.name);
  c.seed = doc.value("seed", c.seed);
  c.n_runs = doc.value("n_runs", c.n_runs);
  c.parallelism = doc.value("parallelism", c.parallelism);
  c.keep_artifacts = doc.value("keep_artifacts", false);
  c.interpose = doc.value("interpose", std::string("preload")) == "fuse" ? InterposeMode::Fuse
                                                                          : InterposeMode::Preload;
  if (doc.contains("workdir")) {
    fs::path w = doc["workdir"].get<std::string>();
    c.workdir = (w.is_absolute() ? w : fs::path(c.config_dir) / w).lexically_normal().string();
  } else {
    c.workdir = (fs::absolute(default_workdir_root()) / c.name).lexically_normal().string();
  }

  const json& w = doc["workload"];
  c.workload.steps = argv_list(w["steps"]);
  if (w.contains("analysis")) c.workload.analysis = argv_list(w["analysis"]);
  for (const auto& in : w.value("inputs", json::array())) {
    fs::path p = in.get<std::string>();
    c.workload.inputs.push_back((p.is_absolute() ? p : fs::path(c.config_dir) / p).lexically_normal().string());
  }
  if (w.contains("env")) c.workload.env = w["env"].get<std::map<std::string, std::string>>();

  const json& f = doc["fault"];
  c.fault.model.kind = *faultmodel::parse_fault_kind(f["model"].get<std::string>());
  c.fault.primitive = *interpose::parse_primitive(f.value("primitive", std::string("write")));
  c.fault.model.bitflip_n = f.value("bitflip_n", 2u);
  c.fault.model.shorn_keep_eighths = f.value("shorn_keep_eighths", 7u);
  c.fault.validate();

  const json& p = doc["policy"];
  c.policy.mode = p["mode"] == "ThresholdRange" ? classify::PolicyMode::ThresholdRange
                                                : classify::PolicyMode::BitwiseOnly;
  c.policy.compared_outputs = p.value("compared_outputs", std::vector<std::string>{});
  c.policy.required_outputs = p.value("required_outputs", std::vector<std::string>{});
  if (p.contains("sdc_range")) {
    c.policy.sdc_lo = p["sdc_range"][0].get<double>();
    c.policy.sdc_hi = p["sdc_range"][1].get<double>();
  }
  c.policy.stat_file = p.value("stat_file", std::string());
  c.policy.stat_key = p.value("stat_key", std::string());
  c.policy.detector = p.value("detector", std::string("none")) == "zero_halos" ? classify::DomainDetector::ZeroHalos
                                                                              : classify::DomainDetector::None;
  c.policy.suspect_is_detected = p.value("suspect_is_detected", false);
  c.policy.timeout_factor = p.value("timeout_factor", 10.0);
  c.suspect_key = p.value("suspect_key", std::string());
  c.record_keys = p.value("record_keys", std::vector<std::string>{});
  c.min_timeout_s = p.value("min_timeout_s", 2.0);
  c.policy.validate();
  if (c.policy.compared_outputs.empty()) throw ConfigError("policy.compared_outputs must name at least one output");
  if (c.policy.mode == classify::PolicyMode::ThresholdRange && !p.contains("sdc_range")) {
    throw ConfigError("ThresholdRange policy needs sdc_range");
  }

  if (doc.contains("resampling")) {
    c.max_resamples = doc["resampling"].value("max_resamples", c.max_resamples);
    c.max_nofire_fraction = doc["resampling"].value("max_nofire_fraction", c.max_nofire_fraction);
  }
  return c;
}

CampaignConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError({std::string("/: not valid JSON: ") + e.what()});
  }
  return parse_config(doc, fs::absolute(path).parent_path().string());
}

json config_to_json(const CampaignConfig& c) {
  json j;
  j["schema_version"] = 1;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["n_runs"] = c.n_runs;
  j["interpose"] = c.interpose == InterposeMode::Fuse ? "fuse" : "preload";
  j["workload"] = {{"steps", c.workload.steps}, {"analysis", c.workload.analysis},
                   {"inputs", c.workload.inputs}, {"env", c.workload.env}};
  j["fault"] = {{"model", std::string(faultmodel::to_string(c.fault.model.kind))},
                {"primitive", std::string(interpose::to_string(c.fault.primitive))},
                {"bitflip_n", c.fault.model.bitflip_n},
                {"shorn_keep_eighths", c.fault.model.shorn_keep_eighths}};
  j["policy"] = {{"mode", c.policy.mode == classify::PolicyMode::ThresholdRange ? "ThresholdRange" : "BitwiseOnly"},
                 {"compared_outputs", c.policy.compared_outputs},
                 {"required_outputs", c.policy.required_outputs},
                 {"sdc_range", {c.policy.sdc_lo, c.policy.sdc_hi}},
                 {"stat_file", c.policy.stat_file},
                 {"stat_key", c.policy.stat_key},
                 {"detector", c.policy.detector == classify::DomainDetector::ZeroHalos ? "zero_halos" : "none"},
                 {"suspect_key", c.suspect_key},
                 {"suspect_is_detected", c.policy.suspect_is_detected},
                 {"record_keys", c.record_keys},
                 {"timeout_factor", c.policy.timeout_factor},
                 {"min_timeout_s", c.min_timeout_s}};
  j["resampling"] = {{"max_resamples", c.max_resamples}, {"max_nofire_fraction", c.max_nofire_fraction}};
  return j;
}

}  // namespace faultfs::campaign
