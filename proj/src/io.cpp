#include "cmablb/io.hpp"

#include <charconv>
#include <stdexcept>

namespace cmablb {

namespace {

Json vec_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector json_vec(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json subset_json(const SubsetSpec& s) {
  return Json{{"indices", s.indices()}, {"complement_size", s.complement_size()}};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename F>
void split_csv(std::string_view text, F&& each) {
  if (trim(text).empty()) return;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    each(trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
}

}  // namespace

Json to_json(const DisjointInstance& inst) {
  Json bound{{"kind", std::string(to_string(inst.bound.kind))},
             {"value", inst.bound.value},
             {"smoothness", inst.bound.smoothness}};
  if (inst.bound.horizon) bound["horizon"] = *inst.bound.horizon;
  if (inst.bound.min_horizon) bound["min_horizon"] = *inst.bound.min_horizon;
  return Json{{"schema_version", kSchemaVersion},
              {"m", inst.m},
              {"K", inst.k},
              {"I", inst.subset.indices()},
              {"mu", vec_json(inst.mu)},
              {"mu_common", vec_json(inst.mu_common)},
              {"p", vec_json(inst.p)},
              {"groups", inst.groups},
              {"epsilon", vec_json(inst.epsilon)},
              {"actions", inst.actions},
              {"optimal_index", inst.optimal_index},
              {"gap", inst.gap},
              {"reward_name", inst.reward_name},
              {"bound_annotations", bound}};
}

DisjointInstance instance_from_json(const Json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version");
    }
    DisjointInstance inst;
    inst.m = j.at("m").get<std::size_t>();
    inst.k = j.at("K").get<std::size_t>();
    inst.subset = SubsetSpec(inst.k, j.at("I").get<std::vector<std::size_t>>());
    inst.mu = json_vec(j.at("mu"));
    inst.mu_common = json_vec(j.at("mu_common"));
    inst.p = json_vec(j.at("p"));
    inst.groups = j.at("groups").get<std::vector<std::size_t>>();
    inst.epsilon = json_vec(j.at("epsilon"));
    inst.actions = j.at("actions").get<std::vector<std::vector<std::size_t>>>();
    inst.optimal_index = j.at("optimal_index").get<std::size_t>();
    inst.gap = j.at("gap").get<double>();
    inst.reward_name = j.at("reward_name").get<std::string>();
    const Json& b = j.at("bound_annotations");
    inst.bound.kind = parse_bound_kind(b.at("kind").get<std::string>());
    inst.bound.value = b.at("value").get<double>();
    inst.bound.smoothness = b.at("smoothness").get<double>();
    if (b.contains("horizon")) inst.bound.horizon = b["horizon"].get<double>();
    if (b.contains("min_horizon")) inst.bound.min_horizon = b["min_horizon"].get<double>();
    validate_instance(inst);
    return inst;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
  }
}

Json to_json(const BoundReport& report) {
  Json out{{"schema_version", kSchemaVersion},
           {"kind", std::string(to_string(report.kind))},
           {"value", report.value},
           {"degenerate", report.degenerate},
           {"maximizing_subset", subset_json(report.maximizing_subset)},
           {"smoothness", report.smoothness},
           {"inputs", Json{{"mu", vec_json(report.mu)}, {"m", report.m}, {"K", report.k}, {"copies", report.copies}}}};
  if (report.gap) out["inputs"]["gap"] = *report.gap;
  if (report.horizon) out["inputs"]["horizon"] = *report.horizon;
  return out;
}

Json to_json(const SmoothnessReport& report) {
  return Json{{"schema_version", kSchemaVersion},
              {"subset", subset_json(report.subset)},
              {"l2", report.l2},
              {"l1", report.l1},
              {"modified", report.modified},
              {"variance_form", report.variance}};
}

Json to_json(const SubsetOptimum& optimum, Measure measure, Objective objective, SearchMethod method) {
  return Json{{"schema_version", kSchemaVersion},
              {"measure", std::string(to_string(measure))},
              {"objective", std::string(to_string(objective))},
              {"method", std::string(to_string(method))},
              {"subset", subset_json(optimum.subset)},
              {"value", optimum.value},
              {"heuristic", optimum.heuristic}};
}

Json to_json(const BoundComparison& cmp) {
  return Json{{"schema_version", kSchemaVersion},
              {"strategy", std::string(to_string(cmp.strategy))},
              {"seeds", cmp.seeds},
              {"horizon", cmp.horizon},
              {"mean_regret", cmp.mean},
              {"stderr", cmp.stderr_},
              {"reference", cmp.reference},
              {"ratio", cmp.ratio},
              {"flag", std::string(to_string(cmp.flag))}};
}

Json to_json(const VerifyReport& report) {
  Json checks = Json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"status", c.pass ? "pass" : "fail"},
                          {"measured", c.measured},
                          {"threshold", c.threshold},
                          {"seed", c.seed}});
  }
  return Json{{"schema_version", kSchemaVersion},
              {"suite", report.suite},
              {"seed", report.seed},
              {"trials", report.trials},
              {"passed", report.passed()},
              {"checks", checks}};
}

Vector parse_csv_vector(std::string_view text) {
  std::vector<double> values;
  split_csv(text, [&](std::string_view tok) {
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("not a number: '" + std::string(tok) + "'");
    }
    values.push_back(v);
  });
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<std::size_t> parse_csv_indices(std::string_view text) {
  std::vector<std::size_t> out;
  split_csv(text, [&](std::string_view tok) {
    std::size_t v = 0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
      throw std::invalid_argument("not an index: '" + std::string(tok) + "'");
    }
    out.push_back(v);
  });
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace cmablb
