// SPDX-License-Identifier: Apache-2.0
#include "faultfs/campaign/schema.hpp"

#include <cmath>

#include "campaign_schema_text.hpp"

namespace faultfs::campaign {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
  }
  return false;
}

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& s, const json& v, const std::string& at) {
    if (s.is_boolean()) {
      if (!s.get<bool>()) fail(at, "is not allowed here");
      return;
    }
    if (s.contains("$ref")) {
      check(resolve(s["$ref"].get<std::string>()), v, at);
      return;
    }
    if (s.contains("type")) {
      const json& t = s["type"];
      bool ok = false;
      if (t.is_string()) ok = has_type(v, t.get<std::string>());
      for (const auto& alt : t.is_array() ? t : json::array()) ok = ok || has_type(v, alt.get<std::string>());
      if (!ok) {
        fail(at, "expected type " + t.dump() + ", got " + std::string(v.type_name()));
        return;
      }
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) fail(at, "value " + v.dump() + " not one of " + s["enum"].dump());
    }
    if (s.contains("const") && s["const"] != v) fail(at, "must equal " + s["const"].dump());
    if (v.is_number()) numeric(s, v.get<double>(), at);
    if (v.is_string() && s.contains("minLength") &&
        v.get<std::string>().size() < s["minLength"].get<std::size_t>()) {
      fail(at, "shorter than " + s["minLength"].dump() + " characters");
    }
    if (v.is_array()) array(s, v, at);
    if (v.is_object()) object(s, v, at);
  }

  std::vector<std::string> errors;

 private:
  void fail(const std::string& at, const std::string& msg) {
    errors.push_back((at.empty() ? std::string("/") : at) + ": " + msg);
  }

  const json& resolve(const std::string& ref) {
    if (ref.rfind("#", 0) != 0) throw std::invalid_argument("only local $ref is supported: " + ref);
    return root_.at(json::json_pointer(ref.substr(1)));
  }

  void numeric(const json& s, double x, const std::string& at) {
    if (s.contains("minimum") && x < s["minimum"].get<double>()) fail(at, "below minimum " + s["minimum"].dump());
    if (s.contains("maximum") && x > s["maximum"].get<double>()) fail(at, "above maximum " + s["maximum"].dump());
    if (s.contains("exclusiveMinimum") && x <= s["exclusiveMinimum"].get<double>()) {
      fail(at, "must exceed " + s["exclusiveMinimum"].dump());
    }
    if (s.contains("exclusiveMaximum") && x >= s["exclusiveMaximum"].get<double>()) {
      fail(at, "must be below " + s["exclusiveMaximum"].dump());
    }
  }

  void array(const json& s, const json& v, const std::string& at) {
    if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
      fail(at, "needs at least " + s["minItems"].dump() + " items");
    }
    if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) {
      fail(at, "allows at most " + s["maxItems"].dump() + " items");
    }
    if (s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], at + "/" + std::to_string(i));
    }
  }

  void object(const json& s, const json& v, const std::string& at) {
    for (const auto& r : s.value("required", json::array())) {
      if (!v.contains(r.get<std::string>())) fail(at, "missing required property \"" + r.get<std::string>() + "\"");
    }
    const json props = s.value("properties", json::object());
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string child = at + "/" + it.key();
      if (props.contains(it.key())) {
        check(props[it.key()], it.value(), child);
      } else if (s.contains("additionalProperties")) {
        const json& ap = s["additionalProperties"];
        if (ap.is_boolean() && !ap.get<bool>()) {
          fail(child, "unknown property");
        } else {
          check(ap, it.value(), child);
        }
      }
    }
  }

  const json& root_;
};

}  // namespace

std::vector<std::string> validate_against(const json& schema, const json& doc) {
  Validator v(schema);
  v.check(schema, doc, "");
  return v.errors;
}

const json& campaign_schema() {
  static const json schema = json::parse(kCampaignSchemaText);
  return schema;
}

}  // namespace faultfs::campaign
