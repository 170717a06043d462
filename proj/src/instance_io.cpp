#include "jsvqa/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jsvqa/errors.hpp"

namespace jsvqa {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& why) {
  throw InstanceError(origin + ": " + why);
}

void require_fields(const json& obj, const std::set<std::string>& required,
                    const std::set<std::string>& optional, const std::string& origin,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!required.count(item.key()) && !optional.count(item.key()))
      fail(origin, where + ": unknown field \"" + item.key() + "\"");
  }
  for (const auto& name : required)
    if (!obj.contains(name)) fail(origin, where + ": missing field \"" + name + "\"");
}

int get_int(const json& obj, const std::string& field, const std::string& origin) {
  const auto& v = obj.at(field);
  if (!v.is_number_integer()) fail(origin, "field \"" + field + "\" must be an integer");
  return v.get<int>();
}

double get_number(const json& obj, const std::string& field, const std::string& origin) {
  const auto& v = obj.at(field);
  if (!v.is_number()) fail(origin, "field \"" + field + "\" must be a number");
  return v.get<double>();
}

std::string label_of(const json& v, const std::string& origin) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  fail(origin, "group labels must be strings or integers");
}

}  // namespace

InstanceFile parse_instance(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) fail(origin, "top level must be a JSON object");

  require_fields(doc,
                 {"jobs", "machines", "idle", "due", "groups", "cost_early", "cost_late",
                  "cost_switch", "penalty"},
                 {"fix"}, origin, "instance");

  InstanceFile out;
  JspInstance& inst = out.instance;
  inst.num_jobs = get_int(doc, "jobs", origin);
  inst.num_machines = get_int(doc, "machines", origin);

  const auto& idle = doc.at("idle");
  if (!idle.is_array()) fail(origin, "field \"idle\" must be an array");
  for (const auto& v : idle) {
    if (!v.is_number_integer()) fail(origin, "field \"idle\" entries must be integers");
    inst.idle_budget.push_back(v.get<int>());
  }

  const auto& due = doc.at("due");
  if (!due.is_array()) fail(origin, "field \"due\" must be an array");
  for (const auto& v : due) {
    if (!v.is_number_integer()) fail(origin, "field \"due\" entries must be integers");
    inst.due_time.push_back(v.get<int>());
  }

  const auto& groups = doc.at("groups");
  if (!groups.is_array()) fail(origin, "field \"groups\" must be an array of arrays");
  for (const auto& row : groups) {
    if (!row.is_array()) fail(origin, "field \"groups\" must be an array of arrays");
    std::vector<std::string> labels;
    for (const auto& v : row) labels.push_back(label_of(v, origin));
    inst.production_group.push_back(std::move(labels));
  }

  inst.cost_early = get_number(doc, "cost_early", origin);
  inst.cost_late = get_number(doc, "cost_late", origin);
  inst.cost_switch = get_number(doc, "cost_switch", origin);

  const auto& penalty = doc.at("penalty");
  if (penalty.is_string()) {
    if (penalty.get<std::string>() != "auto")
      fail(origin, "field \"penalty\" must be a positive number or \"auto\"");
    out.penalty_auto = true;
    inst.penalty_weight = 1.0;  // placeholder until validation below
  } else if (penalty.is_number()) {
    inst.penalty_weight = penalty.get<double>();
  } else {
    fail(origin, "field \"penalty\" must be a positive number or \"auto\"");
  }

  try {
    if (out.penalty_auto) {
      JspInstance probe = inst;
      probe.penalty_weight = 1.0;
      probe.validate();
      inst.penalty_weight = default_penalty_weight(probe);
    }
    inst.validate();
  } catch (const std::exception& e) {
    fail(origin, e.what());
  }

  if (doc.contains("fix")) {
    const auto& fixes = doc.at("fix");
    if (!fixes.is_array()) fail(origin, "field \"fix\" must be an array");
    int entry_no = 0;
    for (const auto& f : fixes) {
      ++entry_no;
      const std::string where = "fix[" + std::to_string(entry_no - 1) + "]";
      if (!f.is_object()) fail(origin, where + ": must be an object");
      if (!f.contains("var")) fail(origin, where + ": missing field \"var\"");
      const auto& kind = f.at("var");
      if (!kind.is_string()) fail(origin, where + ": field \"var\" must be \"x\" or \"y\"");
      FixDirective d;
      const std::string k = kind.get<std::string>();
      if (k == "x") {
        require_fields(f, {"var", "m", "j", "t", "value"}, {}, origin, where);
        d.var = {VarDesc::Kind::Real, get_int(f, "m", origin), get_int(f, "j", origin),
                 get_int(f, "t", origin)};
      } else if (k == "y") {
        require_fields(f, {"var", "m", "t", "value"}, {}, origin, where);
        d.var = {VarDesc::Kind::Dummy, get_int(f, "m", origin), 0, get_int(f, "t", origin)};
      } else {
        fail(origin, where + ": field \"var\" must be \"x\" or \"y\"");
      }
      const int value = get_int(f, "value", origin);
      if (value != 0 && value != 1) fail(origin, where + ": field \"value\" must be 0 or 1");
      d.value = static_cast<std::uint8_t>(value);
      out.fixes.push_back(d);
    }
  }
  return out;
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path);
}

std::vector<FixedVar> resolve_fixes(const InstanceFile& file, const VariableMap& map) {
  std::vector<FixedVar> out;
  out.reserve(file.fixes.size());
  for (const auto& d : file.fixes) {
    int index = 0;
    try {
      index = map.index_of(d.var);
    } catch (const std::exception& e) {
      throw InstanceError(std::string("fix directive: ") + e.what());
    }
    out.push_back({index, d.value});
  }
  return out;
}

}  // namespace jsvqa
