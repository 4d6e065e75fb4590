/*   Copyright 2026 The AdaTSK Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */
#pragma once

// File formats: the flat key = value run configuration, model.json,
// report.json and gate-trajectory CSVs.

#include "adatsk/data.hpp"
#include "adatsk/pipeline.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace adatsk {

struct RunConfig {
    std::filesystem::path dataset;
    std::string label_column = "class";
    TrainConfig train;
    std::size_t folds = 10;
    std::size_t repeats = 1;
    std::filesystem::path out = "out";
    NormalizationMode normalization = NormalizationMode::minmax;
    // gate-demo only
    std::size_t demo_sets = 3;
    double legacy_eta = 0.05;
};

/// Parses `key = value` lines; '#' starts a comment. Relative paths are
/// resolved against `base_dir`. Throws UsageError on unknown keys or bad values.
RunConfig parse_run_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Enumerates the accepted keys with their defaults, one per line.
std::string describe_config_keys();

nlohmann::json classifier_to_json(const Classifier& classifier);
Classifier classifier_from_json(const nlohmann::json& j);
void save_classifier(const Classifier& classifier, const std::filesystem::path& path);
Classifier load_classifier(const std::filesystem::path& path);

/// Deterministic report: no wall-clock data.
nlohmann::json report_to_json(const PipelineReport& report);
/// Per-run phase timings.
nlohmann::json timing_to_json(const PipelineReport& report);

/// "iteration,<names...>" header, then one row per iteration (1-based).
void write_trajectory_csv(const Matrix& trajectory, const std::vector<std::string>& names,
                          const std::filesystem::path& path);

/// Shortest round-trip decimal text for a double.
std::string format_double(double v);

/// Writes `text` to `path`, throwing UsageError if the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Creates the directory if needed and checks that it accepts files.
void ensure_writable_dir(const std::filesystem::path& dir);

} // namespace adatsk
