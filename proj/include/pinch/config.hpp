// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "pinch/core.hpp"

#include <filesystem>
#include <iosfwd>

namespace pinch
{

/// Reads an INI-style scenario file (`key = value` under `[section]`
/// headers). Powers may be given in watts (`bs_total_w`) or dBm
/// (`bs_total_dbm`); everything else is SI. Missing keys fall back to the
/// reference-experiment defaults. The result is validated before returning.
ScenarioConfig load_config(const std::filesystem::path &path);
ScenarioConfig parse_config(std::istream &in);

/// Writes a config back out in the same schema; parse_config(write) round-trips.
void write_config(std::ostream &out, const ScenarioConfig &config);

} // namespace pinch
