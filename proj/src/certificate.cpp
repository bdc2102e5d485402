#include "drlref/certificate.hpp"

#include <json.hpp>

#include "drlref/parser.hpp"
#include "drlref/printer.hpp"

namespace drlref {

namespace {

using nlohmann::json;

json sequent_to_json(const Sequent& s) {
  json j;
  j["ante"] = json::array();
  j["succ"] = json::array();
  for (const auto& f : s.ante) j["ante"].push_back(pretty(f));
  for (const auto& f : s.succ) j["succ"].push_back(pretty(f));
  return j;
}

Sequent sequent_from_json(const json& j) {
  Sequent s;
  for (const auto& f : j.at("ante")) s.ante.push_back(parse_formula(f));
  for (const auto& f : j.at("succ")) s.succ.push_back(parse_formula(f));
  return s;
}

json binding_to_json(const BindingValue& v) {
  json j;
  switch (v.kind) {
    case BindingValue::Kind::Var:
      j["kind"] = "variable";
      j["value"] = v.var.str();
      break;
    case BindingValue::Kind::Term:
      j["kind"] = "term";
      j["value"] = pretty(v.term);
      break;
    case BindingValue::Kind::Fml:
      j["kind"] = "formula";
      j["value"] = pretty(v.fml);
      break;
    case BindingValue::Kind::Prog:
      j["kind"] = "program";
      j["value"] = pretty(v.prog);
      break;
    case BindingValue::Kind::Index:
      j["kind"] = "index";
      j["value"] = v.index;
      break;
  }
  return j;
}

BindingValue binding_from_json(const json& j) {
  std::string kind = j.at("kind");
  if (kind == "index")
    return BindingValue::of(static_cast<size_t>(j.at("value").get<size_t>()));
  std::string value = j.at("value");
  if (kind == "variable") {
    bool primed = !value.empty() && value.back() == '\'';
    std::string name = primed ? value.substr(0, value.size() - 1) : value;
    return BindingValue::of(Variable(name, primed));
  }
  if (kind == "term") return BindingValue::of(parse_term(value));
  if (kind == "formula") return BindingValue::of(parse_formula(value));
  if (kind == "program") return BindingValue::of(parse_program(value));
  throw Error("unknown binding kind '" + kind + "'");
}

}  // namespace

std::string certificate_to_json(const Provable& p) {
  json j;
  j["conclusion"] = sequent_to_json(p.conclusion);
  j["steps"] = json::array();
  for (const auto& st : p.trace) {
    json s;
    s["rule"] = st.rule;
    s["goal"] = st.goal;
    s["bindings"] = json::object();
    for (const auto& [k, v] : st.bindings)
      s["bindings"][k] = binding_to_json(v);
    j["steps"].push_back(std::move(s));
  }
  j["assumptions"] = json::array();
  for (const auto& f : p.assumptions) j["assumptions"].push_back(pretty(f));
  j["goals"] = json::array();
  for (const auto& g : p.goals) j["goals"].push_back(sequent_to_json(g));
  return j.dump(2);
}

Provable certificate_from_json(const std::string& text) {
  json j = json::parse(text);
  Provable p;
  p.conclusion = sequent_from_json(j.at("conclusion"));
  for (const auto& s : j.at("steps")) {
    Step st;
    st.rule = s.at("rule");
    st.goal = s.at("goal");
    if (s.contains("bindings"))
      for (const auto& [k, v] : s.at("bindings").items())
        st.bindings[k] = binding_from_json(v);
    p.trace.push_back(std::move(st));
  }
  for (const auto& f : j.at("assumptions"))
    p.assumptions.push_back(parse_formula(f));
  if (j.contains("goals"))
    for (const auto& g : j.at("goals"))
      p.goals.push_back(sequent_from_json(g));
  return p;
}

}  // namespace drlref
