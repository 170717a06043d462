#pragma once

#include <string>
#include <vector>

#include "jsvqa/jsp.hpp"

namespace jsvqa {

struct FixDirective {
  VarDesc var;
  std::uint8_t value = 0;
};

struct InstanceFile {
  JspInstance instance;               // penalty_weight already resolved
  bool penalty_auto = false;          // true when the file said "penalty": "auto"
  std::vector<FixDirective> fixes;
};

// Parses the JSON instance document. Unknown fields are rejected; diagnostics
// name the offending field. Throws InstanceError.
InstanceFile parse_instance(const std::string& text, const std::string& origin);
InstanceFile load_instance(const std::string& path);

// Translates the file's fix directives into flat variable assignments.
std::vector<FixedVar> resolve_fixes(const InstanceFile& file, const VariableMap& map);

}  // namespace jsvqa
