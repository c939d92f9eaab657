#include "flow_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <map>
#include <set>

#include "curvlab/errors.hpp"

namespace curvlab::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKeys{
    {"start", {"preset", "file", "points", "amplitude", "seed"}},
    {"flow",
     {"functional", "family", "target", "step", "max_steps", "residual_target", "line_search", "armijo", "backtrack",
      "growth", "max_step", "max_halvings", "preconditioner", "stencil", "min_eigenvalue", "min_profile"}},
};

template <class T>
T value(const pt::ptree& tree, const std::string& key, T fallback) {
  const auto node = tree.get_child_optional(key);
  if (!node) return fallback;
  try {
    return node->get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw ConfigurationError("config key '" + key + "' has malformed value '" + node->data() + "'");
  }
}

bool boolean(const pt::ptree& tree, const std::string& key, bool fallback) {
  const auto text = value<std::string>(tree, key, fallback ? "true" : "false");
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigurationError("config key '" + key + "' expects true/false, got '" + text + "'");
}

}  // namespace

FlowJob parse_flow_config(std::istream& in, std::uint64_t default_seed) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigurationError(std::string("flow config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    const auto known = kKeys.find(section);
    if (known == kKeys.end()) throw ConfigurationError("flow config: unknown section [" + section + "]");
    if (body.empty()) continue;
    for (const auto& [key, unused] : body)
      if (!known->second.contains(key))
        throw ConfigurationError("flow config: unknown key '" + key + "' in [" + section + "]");
  }

  FlowJob job;
  job.preset = value<std::string>(tree, "start.preset", "");
  job.file = value<std::string>(tree, "start.file", "");
  if (job.preset.empty() == job.file.empty())
    throw ConfigurationError("flow config: [start] needs exactly one of 'preset' or 'file'");
  job.start.points = value(tree, "start.points", 0);
  job.start.amplitude = value(tree, "start.amplitude", 0.0);
  job.start.seed = value<std::uint64_t>(tree, "start.seed", default_seed);

  FlowConfig& c = job.config;
  c.spec = spec_from_string(value<std::string>(tree, "flow.functional", to_string(c.spec)));
  if (const auto fam = value<std::string>(tree, "flow.family", ""); !fam.empty()) {
    if (fam == "full") job.family = FlowFamily::FullGrid;
    else if (fam == "warped") job.family = FlowFamily::WarpedProfile;
    else throw ConfigurationError("flow config: family must be 'full' or 'warped', got '" + fam + "'");
  }
  c.target = flow_target_from_string(value<std::string>(tree, "flow.target", to_string(c.target)));
  c.step = value(tree, "flow.step", c.step);
  c.max_steps = value(tree, "flow.max_steps", c.max_steps);
  c.residual_target = value(tree, "flow.residual_target", c.residual_target);
  c.line_search = boolean(tree, "flow.line_search", c.line_search);
  c.armijo = value(tree, "flow.armijo", c.armijo);
  c.backtrack = value(tree, "flow.backtrack", c.backtrack);
  c.growth = value(tree, "flow.growth", c.growth);
  c.max_step = value(tree, "flow.max_step", c.max_step);
  c.max_halvings = value(tree, "flow.max_halvings", c.max_halvings);
  c.preconditioner = preconditioner_from_string(value<std::string>(tree, "flow.preconditioner", to_string(c.preconditioner)));
  c.stencil = stencil_from_string(value<std::string>(tree, "flow.stencil", to_string(c.stencil)));
  c.min_eigenvalue = value(tree, "flow.min_eigenvalue", c.min_eigenvalue);
  c.min_profile = value(tree, "flow.min_profile", c.min_profile);
  c.validate();
  return job;
}

nlohmann::json to_json(const FlowJob& job) {
  const FlowConfig& c = job.config;
  nlohmann::json start;
  if (!job.preset.empty()) start["preset"] = job.preset;
  else start["file"] = job.file;
  start["points"] = job.start.points;
  start["amplitude"] = job.start.amplitude;
  start["seed"] = job.start.seed;
  return {
      {"start", start},
      {"flow",
       {{"functional", to_string(c.spec)},
        {"target", to_string(c.target)},
        {"step", c.step},
        {"max_steps", c.max_steps},
        {"residual_target", c.residual_target},
        {"line_search", c.line_search},
        {"armijo", c.armijo},
        {"backtrack", c.backtrack},
        {"growth", c.growth},
        {"max_step", c.max_step},
        {"max_halvings", c.max_halvings},
        {"preconditioner", to_string(c.preconditioner)},
        {"stencil", to_string(c.stencil)},
        {"min_eigenvalue", c.min_eigenvalue},
        {"min_profile", c.min_profile}}},
  };
}

}  // namespace curvlab::cli
