// Copyright 2026 The Incidents Toolkit Authors.
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

#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "incidents/cli/config.hpp"
#include "incidents/synth.hpp"
#include "incidents/trainer.hpp"

namespace incidents::cli {

// Each command reads its inputs from `config`, writes its files under the
// `out` directory and returns the report it wrote. `log` receives progress
// lines.
nlohmann::json cmd_synth(const RunConfig& config, std::ostream& log);
nlohmann::json cmd_train(const RunConfig& config, std::ostream& log);
nlohmann::json cmd_eval(const RunConfig& config, std::ostream& log);
nlohmann::json cmd_dedup(const RunConfig& config, std::ostream& log);
nlohmann::json cmd_filter(const RunConfig& config, std::ostream& log);
nlohmann::json cmd_geo_eval(const RunConfig& config, std::ostream& log);
nlohmann::json cmd_monitor(const RunConfig& config, std::ostream& log);

TrainConfig train_config_from(const RunConfig& config);
SynthSpec synth_spec_from(const RunConfig& config);

/// Parses arguments, resolves configuration and dispatches. Errors are
/// reported as one JSON line on `err`; the return value is the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env);

}  // namespace incidents::cli
