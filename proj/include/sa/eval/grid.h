// Copyright 2026 The Residual Copilot Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SA_EVAL_GRID_H_
#define SA_EVAL_GRID_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sa/eval/eval.h"

namespace sa::eval {

struct GridCell {
  double success_rate = 0.0;
  double crash_rate = 0.0;
  double return_general = 0.0;

  bool operator==(const GridCell&) const = default;
};

// Rows are copilots, columns are pilots, both in first-seen order.
struct Grid {
  std::string env;
  std::vector<std::string> copilots;
  std::vector<std::string> pilots;
  std::map<std::pair<std::string, std::string>, GridCell> cells;

  const GridCell& at(const std::string& copilot, const std::string& pilot) const;
  bool operator==(const Grid&) const = default;
};

// Throws InputError when the reports mix envs or repeat a (copilot, pilot)
// pair.
Grid Aggregate(const std::vector<EvalReport>& reports);

// Aligned table: one row per copilot, three columns (success, crash,
// reward) per pilot.
std::string GridText(const Grid& grid);

// Header "env,copilot,<pilot>.success_rate,<pilot>.crash_rate,
// <pilot>.return_general,..." then one line per copilot.
std::string GridCsv(const Grid& grid);
Grid ParseGridCsv(const std::string& text);

}  // namespace sa::eval

#endif  // SA_EVAL_GRID_H_
