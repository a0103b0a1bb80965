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

#include "sa/eval/grid.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "sa/common/config.h"
#include "sa/common/errors.h"

namespace sa::eval {
namespace {

const char* const kMetrics[] = {"success_rate", "crash_rate", "return_general"};

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream s(line);
  while (std::getline(s, item, ',')) out.push_back(item);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double ParseNumber(const std::string& text) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw InputError("bad number in grid csv: " + text);
    return v;
  } catch (const std::logic_error&) {
    throw InputError("bad number in grid csv: " + text);
  }
}

}  // namespace

const GridCell& Grid::at(const std::string& copilot,
                         const std::string& pilot) const {
  auto it = cells.find({copilot, pilot});
  if (it == cells.end()) throw InputError("no grid cell " + copilot + "/" + pilot);
  return it->second;
}

Grid Aggregate(const std::vector<EvalReport>& reports) {
  Grid grid;
  for (const auto& r : reports) {
    if (grid.env.empty()) grid.env = r.env;
    if (r.env != grid.env) throw InputError("cannot aggregate reports of different envs");
    if (std::find(grid.copilots.begin(), grid.copilots.end(), r.copilot) ==
        grid.copilots.end()) {
      grid.copilots.push_back(r.copilot);
    }
    if (std::find(grid.pilots.begin(), grid.pilots.end(), r.pilot) ==
        grid.pilots.end()) {
      grid.pilots.push_back(r.pilot);
    }
    const auto key = std::make_pair(r.copilot, r.pilot);
    if (grid.cells.count(key) != 0) {
      throw InputError("duplicate report for " + r.copilot + "/" + r.pilot);
    }
    grid.cells[key] = {r.success_rate, r.crash_rate, r.mean_return_general};
  }
  return grid;
}

std::string GridText(const Grid& grid) {
  std::ostringstream out;
  out << "env: " << grid.env << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-12s", "copilot");
  out << buf;
  for (const auto& p : grid.pilots) {
    std::snprintf(buf, sizeof(buf), " | %-26s", p.c_str());
    out << buf;
  }
  out << "\n";
  std::snprintf(buf, sizeof(buf), "%-12s", "");
  out << buf;
  for (size_t i = 0; i < grid.pilots.size(); ++i) {
    std::snprintf(buf, sizeof(buf), " | %8s %8s %8s", "success", "crash", "reward");
    out << buf;
  }
  out << "\n";
  for (const auto& c : grid.copilots) {
    std::snprintf(buf, sizeof(buf), "%-12s", c.c_str());
    out << buf;
    for (const auto& p : grid.pilots) {
      auto it = grid.cells.find({c, p});
      if (it == grid.cells.end()) {
        std::snprintf(buf, sizeof(buf), " | %8s %8s %8s", "-", "-", "-");
      } else {
        std::snprintf(buf, sizeof(buf), " | %8.3f %8.3f %8.1f",
                      it->second.success_rate, it->second.crash_rate,
                      it->second.return_general);
      }
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string GridCsv(const Grid& grid) {
  std::ostringstream out;
  out << "env,copilot";
  for (const auto& p : grid.pilots) {
    for (const char* m : kMetrics) out << "," << p << "." << m;
  }
  out << "\n";
  for (const auto& c : grid.copilots) {
    out << grid.env << "," << c;
    for (const auto& p : grid.pilots) {
      auto it = grid.cells.find({c, p});
      if (it == grid.cells.end()) {
        out << ",,,";
        continue;
      }
      out << "," << FormatDouble(it->second.success_rate) << ","
          << FormatDouble(it->second.crash_rate) << ","
          << FormatDouble(it->second.return_general);
    }
    out << "\n";
  }
  return out.str();
}

Grid ParseGridCsv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("grid csv is empty");
  const std::vector<std::string> header = SplitCsv(line);
  if (header.size() < 2 || header[0] != "env" || header[1] != "copilot" ||
      (header.size() - 2) % 3 != 0) {
    throw InputError("grid csv has a malformed header");
  }
  Grid grid;
  for (size_t i = 2; i < header.size(); i += 3) {
    const std::string& col = header[i];
    const size_t dot = col.rfind('.');
    if (dot == std::string::npos) throw InputError("grid csv column lacks a metric");
    const std::string pilot = col.substr(0, dot);
    for (int m = 0; m < 3; ++m) {
      if (header[i + m] != pilot + "." + kMetrics[m]) {
        throw InputError("grid csv column order is wrong near " + col);
      }
    }
    grid.pilots.push_back(pilot);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsv(line);
    if (f.size() != header.size()) throw InputError("grid csv row has wrong width");
    if (grid.env.empty()) grid.env = f[0];
    if (f[0] != grid.env) throw InputError("grid csv mixes envs");
    grid.copilots.push_back(f[1]);
    for (size_t k = 0; k < grid.pilots.size(); ++k) {
      const size_t i = 2 + 3 * k;
      if (f[i].empty()) continue;
      grid.cells[{f[1], grid.pilots[k]}] = {ParseNumber(f[i]), ParseNumber(f[i + 1]),
                                            ParseNumber(f[i + 2])};
    }
  }
  return grid;
}

}  // namespace sa::eval
