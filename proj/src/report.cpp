#include "seqdec/report.hpp"

#include <cmath>

namespace seqdec {

double Check::slack() const {
  switch (relation) {
    case Relation::LessEq: return bound - measured;
    case Relation::GreaterEq: return measured - bound;
    case Relation::AbsLessEq: return bound - std::abs(measured);
  }
  return 0.0;
}

Check make_check(std::string name, double measured, Relation rel, double bound, bool asserted,
                 double tol, std::string note) {
  Check c;
  c.name = std::move(name);
  c.measured = measured;
  c.bound = bound;
  c.relation = rel;
  c.tol = tol;
  c.asserted = asserted;
  c.note = std::move(note);
  c.holds = std::isfinite(measured) && c.slack() >= -tol;
  return c;
}

void Report::append(const Report& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

bool Report::passed() const { return failures() == 0; }

std::size_t Report::failures() const {
  std::size_t f = 0;
  for (const auto& c : checks)
    if (c.asserted && !c.holds) ++f;
  return f;
}

const Check* Report::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::LessEq: return "<=";
    case Relation::GreaterEq: return ">=";
    case Relation::AbsLessEq: return "|.|<=";
  }
  return "?";
}

nlohmann::ordered_json to_json(const Check& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["measured"] = c.measured;
  j["relation"] = relation_symbol(c.relation);
  j["bound"] = c.bound;
  j["slack"] = c.slack();
  j["holds"] = c.holds;
  j["asserted"] = c.asserted;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["title"] = r.title;
  j["passed"] = r.passed();
  j["failures"] = r.failures();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) arr.push_back(to_json(c));
  j["checks"] = std::move(arr);
  return j;
}

}  // namespace seqdec
