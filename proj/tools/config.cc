/*
 * Copyright 2026 The panellime Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace panellime::cli {
namespace {

namespace pt = boost::property_tree;

// Drops a trailing "; comment" or "# comment" preceded by whitespace.
std::string strip_comment(std::string s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == ';' || s[i] == '#') && (s[i - 1] == ' ' || s[i - 1] == '\t')) return s.substr(0, i);
  }
  return s;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  s = s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + text + "'");
}

std::vector<std::string> parse_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

template <typename F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config: '" + key + "': " + e.what());
  }
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"data",
       {{"path", [](PipelineConfig& c, const std::string&, const std::string& v) { c.data_path = v; }},
        {"entity", [](PipelineConfig& c, const std::string&, const std::string& v) { c.schema.entity = v; }},
        {"time", [](PipelineConfig& c, const std::string&, const std::string& v) { c.schema.time = v; }},
        {"target", [](PipelineConfig& c, const std::string&, const std::string& v) { c.schema.target = v; }},
        {"categorical",
         [](PipelineConfig& c, const std::string&, const std::string& v) { c.schema.categorical = parse_list(v); }},
        {"rename_map", [](PipelineConfig& c, const std::string&, const std::string& v) { c.rename_map = v; }}}},
      {"impute",
       {{"method",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
           c.imputation.method = wrap(k, [&] { return parse_imputation_method(v); });
         }},
        {"theta", [](PipelineConfig& c, const std::string& k,
                     const std::string& v) { c.imputation.theta = parse_number<double>(k, v); }},
        {"k", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.imputation.k = parse_number<int>(k, v); }},
        {"max_iterations", [](PipelineConfig& c, const std::string& k,
                              const std::string& v) { c.imputation.max_iterations = parse_number<int>(k, v); }},
        {"tolerance", [](PipelineConfig& c, const std::string& k,
                         const std::string& v) { c.imputation.tolerance = parse_number<double>(k, v); }},
        {"stochastic_residual", [](PipelineConfig& c, const std::string& k, const std::string& v) {
           c.imputation.stochastic_residual = parse_bool(k, v);
         }}}},
      {"reformat",
       {{"strategy", [](PipelineConfig& c, const std::string& k, const std::string& v) {
           c.strategy = wrap(k, [&] { return parse_reformat_strategy(v); });
         }}}},
      {"split",
       {{"train_fraction", [](PipelineConfig& c, const std::string& k,
                              const std::string& v) { c.train_fraction = parse_number<double>(k, v); }}}},
      {"train",
       {{"families",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
           c.search.families.clear();
           for (const auto& f : parse_list(v)) c.search.families.push_back(wrap(k, [&] { return parse_model_family(f); }));
         }},
        {"max_trials", [](PipelineConfig& c, const std::string& k,
                          const std::string& v) { c.search.max_trials = parse_number<int>(k, v); }},
        {"time_budget_seconds", [](PipelineConfig& c, const std::string& k,
                                   const std::string& v) { c.search.time_budget_seconds = parse_number<double>(k, v); }},
        {"metric", [](PipelineConfig& c, const std::string&, const std::string& v) { c.search.metric = v; }},
        {"validation_fraction", [](PipelineConfig& c, const std::string& k, const std::string& v) {
           c.search.validation_fraction = parse_number<double>(k, v);
         }}}},
      {"lime",
       {{"kernel_width", [](PipelineConfig& c, const std::string& k,
                            const std::string& v) { c.lime.kernel_width = parse_number<double>(k, v); }},
        {"n_samples", [](PipelineConfig& c, const std::string& k,
                         const std::string& v) { c.lime.n_samples = parse_number<int>(k, v); }},
        {"k_features", [](PipelineConfig& c, const std::string& k,
                          const std::string& v) { c.lime.k_features = parse_number<int>(k, v); }},
        {"ridge_lambda", [](PipelineConfig& c, const std::string& k,
                            const std::string& v) { c.lime.ridge_lambda = parse_number<double>(k, v); }},
        {"standardize", [](PipelineConfig& c, const std::string& k,
                           const std::string& v) { c.lime.standardize = parse_bool(k, v); }},
        {"rows",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
           if (v == "test") {
             c.explain_rows = ExplainRows::test;
           } else if (v == "all") {
             c.explain_rows = ExplainRows::all;
           } else {
             throw ConfigError("config: '" + k + "' must be test or all");
           }
         }},
        {"max_instances", [](PipelineConfig& c, const std::string& k,
                             const std::string& v) { c.explain_max_instances = parse_number<int>(k, v); }}}},
      {"pick",
       {{"budget", [](PipelineConfig& c, const std::string& k,
                      const std::string& v) { c.pick_budget = parse_number<int>(k, v); }},
        {"top_k", [](PipelineConfig& c, const std::string& k,
                     const std::string& v) { c.pick_top_k = parse_number<int>(k, v); }},
        {"coverage", [](PipelineConfig& c, const std::string& k, const std::string& v) {
           c.coverage_mode = wrap(k, [&] { return parse_coverage_mode(v); });
         }}}},
      {"ice",
       {{"grid_points", [](PipelineConfig& c, const std::string& k,
                           const std::string& v) { c.ice_grid_points = parse_number<int>(k, v); }},
        {"max_instances", [](PipelineConfig& c, const std::string& k,
                             const std::string& v) { c.ice_max_instances = parse_number<int>(k, v); }},
        {"features", [](PipelineConfig& c, const std::string&, const std::string& v) { c.ice_features = parse_list(v); }}}},
      {"eval",
       {{"k", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.eval.k = parse_number<int>(k, v); }},
        {"runs", [](PipelineConfig& c, const std::string& k,
                    const std::string& v) { c.eval.n_runs = parse_number<int>(k, v); }},
        {"max_instances", [](PipelineConfig& c, const std::string& k,
                             const std::string& v) { c.eval.max_instances = parse_number<int>(k, v); }}}},
      {"run",
       {{"seed", [](PipelineConfig& c, const std::string& k,
                    const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        {"out", [](PipelineConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"svg", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.write_svg = parse_bool(k, v); }}}},
  };
  return table;
}

pt::ptree section_tree(const PipelineConfig& c, const std::string& section, bool include_out) {
  pt::ptree t;
  const auto put = [&t](const char* key, const std::string& value) { t.put(key, value); };
  const auto num = [](double v) { return format_double(v); };
  if (section == "data") {
    put("path", c.data_path.string());
    put("entity", c.schema.entity);
    put("time", c.schema.time);
    put("target", c.schema.target);
    put("categorical", join(c.schema.categorical));
    put("rename_map", c.rename_map.string());
  } else if (section == "impute") {
    put("method", to_string(c.imputation.method));
    put("theta", num(c.imputation.theta));
    put("k", std::to_string(c.imputation.k));
    put("max_iterations", std::to_string(c.imputation.max_iterations));
    put("tolerance", num(c.imputation.tolerance));
    put("stochastic_residual", c.imputation.stochastic_residual ? "true" : "false");
  } else if (section == "reformat") {
    put("strategy", to_string(c.strategy));
  } else if (section == "split") {
    put("train_fraction", num(c.train_fraction));
  } else if (section == "train") {
    std::vector<std::string> families;
    for (const auto f : c.search.families) families.emplace_back(to_string(f));
    put("families", join(families));
    put("max_trials", std::to_string(c.search.max_trials));
    put("time_budget_seconds", num(c.search.time_budget_seconds));
    put("metric", c.search.metric);
    put("validation_fraction", num(c.search.validation_fraction));
  } else if (section == "lime") {
    put("kernel_width", num(c.lime.kernel_width));
    put("n_samples", std::to_string(c.lime.n_samples));
    put("k_features", std::to_string(c.lime.k_features));
    put("ridge_lambda", num(c.lime.ridge_lambda));
    put("standardize", c.lime.standardize ? "true" : "false");
    put("rows", c.explain_rows == ExplainRows::test ? "test" : "all");
    put("max_instances", std::to_string(c.explain_max_instances));
  } else if (section == "pick") {
    put("budget", std::to_string(c.pick_budget));
    put("top_k", std::to_string(c.pick_top_k));
    put("coverage", to_string(c.coverage_mode));
  } else if (section == "ice") {
    put("grid_points", std::to_string(c.ice_grid_points));
    put("max_instances", std::to_string(c.ice_max_instances));
    put("features", join(c.ice_features));
  } else if (section == "eval") {
    put("k", std::to_string(c.eval.k));
    put("runs", std::to_string(c.eval.n_runs));
    put("max_instances", std::to_string(c.eval.max_instances));
  } else if (section == "run") {
    put("seed", std::to_string(c.seed));
    if (include_out) {
      put("out", c.out_dir.string());
      put("svg", c.write_svg ? "true" : "false");
    }
  } else {
    throw std::invalid_argument("unknown config section: " + section);
  }
  return t;
}

constexpr const char* kSections[] = {"data", "impute", "reformat", "split", "train", "lime",
                                     "pick", "ice",    "eval",     "run"};

std::string write_tree(const pt::ptree& t) {
  std::ostringstream os;
  pt::write_ini(os, t);
  return os.str();
}

}  // namespace

void PipelineConfig::validate() const {
  const auto check = [](auto&& f) {
    try {
      f();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  };
  if (data_path.empty()) throw ConfigError("config: [data] path is required");
  if (schema.entity.empty() || schema.time.empty() || schema.target.empty()) {
    throw ConfigError("config: [data] entity, time and target are required");
  }
  check([&] { imputation.validate(); });
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("config: train_fraction must lie in (0, 1)");
  check([&] { search.validate(); });
  check([&] { lime.validate(); });
  if (lime.kernel_width < 0.0) throw ConfigError("config: kernel_width must be positive (0 selects the default)");
  if (explain_max_instances < 0) throw ConfigError("config: [lime] max_instances must be nonnegative");
  if (pick_budget < 1) throw ConfigError("config: [pick] budget must be at least 1");
  if (pick_top_k < 1) throw ConfigError("config: [pick] top_k must be at least 1");
  if (ice_grid_points < 2) throw ConfigError("config: [ice] grid_points must be at least 2");
  if (ice_max_instances < 1) throw ConfigError("config: [ice] max_instances must be at least 1");
  check([&] { eval.validate(); });
}

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  PipelineConfig c;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty() && body.empty()) {
      throw ConfigError("config: key '" + section + "' appears outside a section");
    }
    const auto s = setters().find(section);
    if (s == setters().end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      const auto k = s->second.find(key);
      if (k == s->second.end()) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
      k->second(c, section + "." + key, trim(strip_comment(value.data())));
    }
  }
  const auto resolve = [&base_dir](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative() && !base_dir.empty()) p = (base_dir / p).lexically_normal();
  };
  resolve(c.data_path);
  resolve(c.rename_map);
  resolve(c.out_dir);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string to_ini(const PipelineConfig& config) {
  pt::ptree t;
  for (const char* s : kSections) t.add_child(s, section_tree(config, s, true));
  return write_tree(t);
}

std::string section_text(const PipelineConfig& config, const std::string& section) {
  pt::ptree t;
  t.add_child(section, section_tree(config, section, false));
  return write_tree(t);
}

std::uint64_t stage_seed(const PipelineConfig& config, SeedStream stream) {
  return derive_seed(config.seed, static_cast<std::uint64_t>(stream));
}

}  // namespace panellime::cli
