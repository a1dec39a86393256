#pragma once

// Named inequality checks collected by the verify_* functions.

#include <string>
#include <vector>

#include <json.hpp>

namespace seqdec {

enum class Relation { LessEq, GreaterEq, AbsLessEq };

struct Check {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  Relation relation = Relation::LessEq;
  double tol = 1e-9;
  bool holds = false;
  // False when the inequality's hypotheses are not met (informative only).
  bool asserted = true;
  std::string note;

  double slack() const;
};

Check make_check(std::string name, double measured, Relation rel, double bound,
                 bool asserted = true, double tol = 1e-9, std::string note = {});

struct Report {
  std::string title;
  std::vector<Check> checks;

  void add(Check c) { checks.push_back(std::move(c)); }
  void append(const Report& other);
  // Only asserted checks count.
  bool passed() const;
  std::size_t failures() const;
  const Check* find(const std::string& name) const;
};

const char* relation_symbol(Relation r);
nlohmann::ordered_json to_json(const Check& c);
nlohmann::ordered_json to_json(const Report& r);

}  // namespace seqdec
