#include "motivic/runner.hpp"

#include "motivic/biggroup.hpp"
#include "motivic/laurent.hpp"
#include "motivic/oracle.hpp"
#include "motivic/slot_series.hpp"

#include <future>
#include <map>
#include <sstream>

namespace motivic {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct Context {
  GroupSpec group;
  std::map<std::string, OmegaSet> sets;
  std::map<std::string, GroupElement> elements;
  int cutoff = -10;
  std::vector<long long> q_list{2, 3};
  std::uint64_t seed = 1;
};

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(where + ": '" + key + "' has the wrong type");
  }
}

OmegaSet parse_omega(const json& j, const GroupSpec& g, const std::string& where) {
  try {
    if (j.is_string()) {
      const std::string s = j.get<std::string>();
      if (s == "big_cell") return OmegaSet::arcs_in_big_cell(g);
      return OmegaSet{parse_set(s), ""};
    }
    if (j.is_object() && j.contains("integral_stratum")) {
      if (g.kind != GroupKind::SL2) throw SchemaError(where + ": integral_stratum needs SL2");
      return OmegaSet{integral_stratum(field<int>(j, "integral_stratum", where)), ""};
    }
    if (j.is_object()) {
      OmegaSet o;
      o.chart_part = j.contains("set") ? parse_set(field<std::string>(j, "set", where)) : CylinderSet::empty(g.dim());
      o.complement = j.value("complement", std::string());
      return o;
    }
  } catch (const ParseError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": expected a set description");
}

const OmegaSet& lookup_set(const Context& c, const json& task, const std::string& where) {
  const auto name = field<std::string>(task, "set", where);
  auto it = c.sets.find(name);
  if (it == c.sets.end()) throw SchemaError(where + ": unknown set '" + name + "'");
  if (it->second.chart_part.dim != c.group.dim()) throw SchemaError(where + ": set '" + name + "' has the wrong dimension");
  return it->second;
}

GroupElement lookup_element(const Context& c, const std::string& name, const std::string& where) {
  auto it = c.elements.find(name);
  if (it != c.elements.end()) return it->second;
  try {
    return parse_element(name, c.group);
  } catch (const ParseError& e) {
    throw SchemaError(where + ": unknown element '" + name + "' (" + e.what() + ")");
  }
}

BigCellChart parse_chart(const Context& c, const json& task, const std::string& where) {
  if (!task.contains("chart")) return BigCellChart::reference(c.group);
  const json& j = task.at("chart");
  if (j == "reference") return BigCellChart::reference(c.group);
  if (j == "swapped") return BigCellChart::swapped(c.group);
  if (j.is_object() && j.contains("conjugate")) {
    return BigCellChart::conjugated(lookup_element(c, field<std::string>(j, "conjugate", where), where));
  }
  throw SchemaError(where + ": chart must be \"reference\", \"swapped\" or {\"conjugate\": element}");
}

ordered_json describe(const MotClass& v, const Context& c) {
  ordered_json out;
  out["value"] = v.to_string();
  out["expansion"] = v.expand(c.cutoff).to_string();
  ordered_json q = ordered_json::object();
  for (long long p : c.q_list) q[std::to_string(p)] = to_string(v.specialize(p));
  out["specializations"] = q;
  return out;
}

struct TaskResult {
  ordered_json record;
  int code = kPass;
};

TaskResult run_measure(const Context& c, const json& t, const std::string& where) {
  const OmegaSet& a = lookup_set(c, t, where);
  const MeasureResult m = haar_measure(a, BigCellChart::reference(c.group));
  TaskResult r;
  r.record["result"] = describe(m.value, c);
  if (m.tail) r.record["tail"] = {{"from", m.tail->from}, {"c", m.tail->c.to_string()}, {"k", m.tail->k}};
  if (t.contains("expect")) {
    MotClass expected;
    try {
      expected = MotClass::parse(field<std::string>(t, "expect", where));
    } catch (const ParseError& e) {
      throw SchemaError(where + ": " + e.what());
    }
    const bool ok = expected == m.value;
    r.record["checks"]["expected"] = ok;
    if (!ok) r.code = kMismatch;
  }
  return r;
}

TaskResult run_invariance(const Context& c, const json& t, const std::string& where) {
  const OmegaSet& a = lookup_set(c, t, where);
  const GroupElement g = lookup_element(c, field<std::string>(t, "element", where), where);
  const InvarianceReport rep = invariance_check(a, g, parse_chart(c, t, where));
  TaskResult r;
  r.record["left"] = describe(rep.left, c);
  r.record["right"] = describe(rep.right, c);
  r.record["route"] = rep.route;
  r.record["checks"] = {{"equal", rep.left == rep.right}, {"order_identity", rep.order_identity}};
  if (!rep.ok) r.code = kMismatch;
  return r;
}

TaskResult run_identity(const Context& c, const json& t, const std::string& where) {
  const GroupElement g = lookup_element(c, field<std::string>(t, "element", where), where);
  const BigCellChart chart = parse_chart(c, t, where);
  const IdentityReport rep = invariance_identity_check(g, chart);
  const bool samples = order_identity_on_samples(g, chart, t.value("samples", 8), t.value("max_pole", 2), c.seed);
  TaskResult r;
  r.record["witness"] = rep.witness.to_string(coord_name);
  r.record["checks"] = {{"identity", rep.ok}, {"order_identity", samples}};
  if (!rep.ok || !samples) r.code = kMismatch;
  return r;
}

TaskResult run_charts(const Context& c, const json& t, const std::string& where) {
  const OmegaSet& a = lookup_set(c, t, where);
  const ChartReport rep = chart_independence_check(a, BigCellChart::reference(c.group), parse_chart(c, t, where));
  TaskResult r;
  r.record["reference"] = describe(rep.first, c);
  r.record["other"] = describe(rep.second, c);
  r.record["checks"] = {{"equal", rep.ok}};
  if (!rep.ok) r.code = kMismatch;
  return r;
}

TaskResult run_oracle(const Context& c, const json& t, const std::string& where) {
  const OmegaSet& a = lookup_set(c, t, where);
  const auto levels = t.contains("levels") ? field<std::vector<int>>(t, "levels", where) : std::vector<int>{0, 1, 2};
  const auto qs = t.contains("q") ? field<std::vector<long long>>(t, "q", where) : c.q_list;
  TaskResult r;
  ordered_json rows = ordered_json::array();
  bool ok = true;
  for (int m : levels) {
    for (long long q : qs) {
      ordered_json row{{"m", m}, {"q", q}};
      try {
        const ClassCheck k = check_class(a.chart_part, m, q);
        row["class"] = k.cls.to_string();
        row["expected"] = to_string(k.expected);
        row["count"] = k.count;
        row["ok"] = k.ok;
        ok = ok && k.ok;
      } catch (const BudgetExceededError&) {
        row["skipped"] = "enumeration budget";
      }
      rows.push_back(row);
    }
  }
  r.record["rows"] = rows;
  r.record["checks"] = {{"counts", ok}};
  if (!ok) r.code = kMismatch;
  return r;
}

TaskResult run_restriction(const Context& c, const json& t, const std::string& where) {
  if (c.group.kind != GroupKind::SL2) throw SchemaError(where + ": restriction needs SL2");
  std::vector<std::pair<int, long long>> levels{{0, 2}, {1, 2}, {2, 2}, {0, 3}, {1, 3}};
  if (t.contains("levels")) levels = field<std::vector<std::pair<int, long long>>>(t, "levels", where);
  const auto qs = t.contains("q") ? field<std::vector<long long>>(t, "q", where) : c.q_list;
  const RestrictionReport rep = canonical_restriction_check(levels, qs);
  TaskResult r;
  ordered_json rows = ordered_json::array();
  for (const auto& list : {rep.rows, rep.big_cell_rows}) {
    for (const auto& row : list) {
      rows.push_back({{"m", row.m}, {"q", row.q}, {"expected", to_string(row.expected)}, {"count", row.count}, {"ok", row.ok}});
    }
  }
  r.record["rows"] = rows;
  r.record["big_cell_arcs"] = describe(rep.big_cell_arcs, c);
  r.record["decomposed_total"] = describe(rep.decomposed_total, c);
  r.record["checks"] = {{"restriction", rep.ok}};
  if (!rep.ok) r.code = kMismatch;
  return r;
}

TaskResult run_task(const Context& c, const json& t, std::size_t index) {
  const std::string where = "tasks[" + std::to_string(index) + "]";
  const auto kind = field<std::string>(t, "kind", where);
  TaskResult r;
  try {
    if (kind == "measure") {
      r = run_measure(c, t, where);
    } else if (kind == "invariance") {
      r = run_invariance(c, t, where);
    } else if (kind == "identity") {
      r = run_identity(c, t, where);
    } else if (kind == "chart_independence") {
      r = run_charts(c, t, where);
    } else if (kind == "oracle") {
      r = run_oracle(c, t, where);
    } else if (kind == "restriction") {
      r = run_restriction(c, t, where);
    } else {
      throw SchemaError(where + ": unknown task kind '" + kind + "'");
    }
  } catch (const SchemaError&) {
    throw;
  } catch (const DivergenceError& e) {
    r.code = kDivergence;
    r.record["error"] = e.what();
  } catch (const PatternMismatchError& e) {
    r.code = kDivergence;
    r.record["error"] = e.what();
  } catch (const UnsupportedConstraintError& e) {
    r.code = kUnsupported;
    r.record["error"] = e.what();
  } catch (const MotivicError& e) {
    r.code = kMismatch;
    r.record["error"] = e.what();
  }
  ordered_json head{{"index", index}, {"kind", kind}, {"inputs", t}};
  head.update(r.record);
  head["status"] = r.code == kPass ? "pass" : (r.code == kMismatch ? "fail" : (r.code == kUnsupported ? "unsupported" : "divergence"));
  r.record = std::move(head);
  return r;
}

Context build_context(const json& config, const RunOptions& options) {
  if (!config.is_object()) throw SchemaError("config must be an object");
  for (const auto& [key, v] : config.items()) {
    if (key != "group" && key != "sets" && key != "elements" && key != "tasks" && key != "output") {
      throw SchemaError("unknown top-level key '" + key + "'");
    }
  }
  Context c;
  try {
    c.group = GroupSpec::parse(field<std::string>(config, "group", "config"));
  } catch (const ParseError& e) {
    throw SchemaError(e.what());
  }
  if (config.contains("output")) {
    const json& o = config.at("output");
    if (o.contains("cutoff")) c.cutoff = field<int>(o, "cutoff", "output");
    if (o.contains("q_list")) c.q_list = field<std::vector<long long>>(o, "q_list", "output");
  }
  if (options.cutoff) c.cutoff = *options.cutoff;
  for (long long q : c.q_list) {
    if (!is_prime(q)) throw SchemaError("output.q_list: " + std::to_string(q) + " is not prime");
  }
  c.seed = options.seed;
  if (config.contains("sets")) {
    if (!config.at("sets").is_object()) throw SchemaError("sets must be an object");
    for (const auto& [name, v] : config.at("sets").items()) c.sets.emplace(name, parse_omega(v, c.group, "sets." + name));
  }
  if (config.contains("elements")) {
    if (!config.at("elements").is_object()) throw SchemaError("elements must be an object");
    for (const auto& [name, v] : config.at("elements").items()) {
      if (!v.is_string()) throw SchemaError("elements." + name + ": expected a literal");
      try {
        c.elements.emplace(name, parse_element(v.get<std::string>(), c.group));
      } catch (const ParseError& e) {
        throw SchemaError("elements." + name + ": " + e.what());
      } catch (const DomainError& e) {
        throw SchemaError("elements." + name + ": " + e.what());
      }
    }
  }
  if (!config.contains("tasks") || !config.at("tasks").is_array()) throw SchemaError("tasks must be an array");
  return c;
}

}  // namespace

RunOutcome run_config(const json& config, const RunOptions& options) {
  RunOutcome out;
  struct PrecisionGuard {
    int saved = default_precision();
    ~PrecisionGuard() { set_default_precision(saved); }
  } guard;
  if (options.precision) set_default_precision(*options.precision);
  Context c;
  try {
    c = build_context(config, options);
    for (std::size_t i = 0; i < config.at("tasks").size(); ++i) {
      const json& t = config.at("tasks")[i];
      if (!t.is_object() || !t.contains("kind") || !t.at("kind").is_string()) {
        throw SchemaError("tasks[" + std::to_string(i) + "]: missing 'kind'");
      }
    }
  } catch (const SchemaError& e) {
    out.report["status"] = "schema";
    out.report["error"] = e.what();
    out.exit_code = kSchema;
    out.report["exit_code"] = kSchema;
    return out;
  }

  const json& tasks = config.at("tasks");
  std::vector<TaskResult> results(tasks.size());
  try {
    if (options.parallel) {
      std::vector<std::future<TaskResult>> jobs;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        jobs.push_back(std::async(std::launch::async, [&, i] { return run_task(c, tasks[i], i); }));
      }
      for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i].get();
    } else {
      for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = run_task(c, tasks[i], i);
    }
  } catch (const SchemaError& e) {
    out.report["status"] = "schema";
    out.report["error"] = e.what();
    out.exit_code = kSchema;
    out.report["exit_code"] = kSchema;
    return out;
  }

  out.report["group"] = c.group.to_string();
  out.report["output"] = {{"cutoff", c.cutoff}, {"q_list", c.q_list}};
  ordered_json records = ordered_json::array();
  ordered_json summary = ordered_json::array();
  for (const auto& r : results) {
    records.push_back(r.record);
    summary.push_back({{"index", r.record["index"]}, {"kind", r.record["kind"]}, {"status", r.record["status"]}});
    if (out.exit_code == kPass) out.exit_code = r.code;
  }
  out.report["tasks"] = records;
  out.report["summary"] = summary;
  out.report["status"] = out.exit_code == kPass ? "pass" : "fail";
  out.report["exit_code"] = out.exit_code;
  return out;
}

std::string render_summary(const ordered_json& report) {
  std::ostringstream out;
  if (report.contains("error")) {
    out << "error: " << report["error"].get<std::string>() << "\n";
    return out.str();
  }
  for (const auto& row : report["summary"]) {
    out << "  [" << row["index"].get<int>() << "] " << row["kind"].get<std::string>() << ": "
        << row["status"].get<std::string>() << "\n";
  }
  out << "status: " << report["status"].get<std::string>() << " (exit " << report["exit_code"].get<int>() << ")\n";
  return out.str();
}

}  // namespace motivic
