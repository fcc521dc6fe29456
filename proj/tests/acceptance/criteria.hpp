#pragma once

#include <functional>
#include <string>
#include <vector>

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;  // wall-clock limit; exceeding it fails the criterion
  std::function<Outcome()> run;
};

const std::vector<Criterion>& all_criteria();

}  // namespace acceptance
