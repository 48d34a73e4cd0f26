#pragma once

#include <string>
#include <vector>

namespace decaygraph {

struct FigureCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct FigureReport {
  std::string id;
  // Controls demonstrate the absence of pure decay; their checks pass when
  // the pure-decay test fails.
  bool control = false;
  std::vector<FigureCheck> checks;

  bool passed() const noexcept;
};

const std::vector<std::string>& figure_ids();

// Runs the canned configuration for one figure id. Throws ValidationError
// for unknown ids.
FigureReport reproduce_figure(const std::string& id);

// figure,control,check,value,tolerance,status
std::string checks_csv(const std::vector<FigureReport>& reports);

}  // namespace decaygraph
