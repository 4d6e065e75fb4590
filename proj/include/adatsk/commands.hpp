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

// Command implementations behind the adatsk executable. Each command throws
// on failure; run_guarded maps exceptions to process exit codes.

#include "adatsk/io.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace adatsk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Runs `body`, printing any error to `err`. ParseError and UsageError give
/// kExitUsage, anything else kExitInternal.
int run_guarded(const std::function<void()>& body, std::ostream& err);

/// Cross-validates the three-phase pipeline, then fits on the whole dataset.
/// Writes report.json, timing.json, model.json, gates_fs.csv and gates_re.csv.
PipelineReport cmd_fsre(const RunConfig& config, std::ostream& log);

struct TnormOutcome {
    TNorm tnorm;
    std::string status;                 // "ok", "underflow" or "diverged"
    std::optional<double> accuracy;     // mean CV accuracy when status is "ok"
    double zero_firing_fraction = 0.0;  // at the initial partition, whole dataset
    std::string detail;
};

/// Plain compact rule base (sets_plain sets, no gates) under product, fixed
/// softmin and Ada-softmin. Any firing strength that underflows to zero marks
/// the operator as failed. Writes tnorm_report.json.
std::vector<TnormOutcome> cmd_compare_tnorms(const RunConfig& config, std::ostream& log);

struct GateDemoRun {
    std::string name;
    math::GateKind kind = math::GateKind::proposed;
    double eta = 0.0;
    double initial_lambda = 0.0;
    Matrix trajectory;           // iterations x D, values of M(lambda)
    std::vector<double> spread;  // max|M| - min|M| per iteration
};

/// Raw gate parameter at which `kind` takes the same value as the proposed
/// gate at `reference`.
double matched_gate_parameter(math::GateKind kind, double reference);

/// Feature-selection phase on the whole dataset with demo_sets sets per
/// feature: proposed gate at eta, exp-sq gate at eta and at legacy_eta.
/// Writes one trajectory CSV per run and gate_demo.json.
std::vector<GateDemoRun> cmd_gate_demo(const RunConfig& config, std::ostream& log);

/// Class labels for every row of `input`, one per line, written to `out`.
/// Missing feature columns are a UsageError naming them.
void cmd_predict(const std::filesystem::path& model_path, const std::filesystem::path& input, std::ostream& out);

/// Writes a synthetic two-state dataset as CSV with a "class" column.
void cmd_synth(const SyntheticSpec& spec, const std::filesystem::path& output);

} // namespace adatsk
