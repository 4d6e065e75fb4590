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
#include "adatsk/commands.hpp"
#include "adatsk/error.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
    cmd->add_option("--config", flags.config, "run configuration (key = value file)")->required();
    cmd->add_option("--seed", flags.seed, "overrides the configured seed");
    cmd->add_option("--out", flags.out, "overrides the configured output directory");
}

adatsk::RunConfig resolve(const RunFlags& flags) {
    adatsk::RunConfig config = adatsk::load_run_config(flags.config);
    if (flags.seed) config.train.seed = *flags.seed;
    if (flags.out) config.out = *flags.out;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive TSK fuzzy classifier with gated feature selection and rule extraction"};
    app.require_subcommand(1);

    RunFlags fsre_flags;
    auto* fsre = app.add_subcommand("fsre", "cross-validate the three-phase pipeline and save the full-data model");
    add_run_flags(fsre, fsre_flags);

    RunFlags tnorm_flags;
    auto* tnorms = app.add_subcommand("compare-tnorms", "plain classifier under product, softmin and Ada-softmin");
    add_run_flags(tnorms, tnorm_flags);

    RunFlags demo_flags;
    auto* demo = app.add_subcommand("gate-demo", "feature-gate trajectories for the proposed and exp-sq gates");
    add_run_flags(demo, demo_flags);

    std::string model_path;
    std::string input_path;
    std::string output_path;
    auto* predict = app.add_subcommand("predict", "label the rows of a CSV file with a saved model");
    predict->add_option("--model", model_path, "model.json written by fsre")->required();
    predict->add_option("--input", input_path, "CSV with the model's feature columns")->required();
    predict->add_option("--output", output_path, "write labels here instead of stdout");

    adatsk::SyntheticSpec synth_spec;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "write a synthetic two-state high-dimensional dataset");
    synth->add_option("--samples", synth_spec.samples)->capture_default_str();
    synth->add_option("--features", synth_spec.features)->capture_default_str();
    synth->add_option("--classes", synth_spec.classes)->capture_default_str();
    synth->add_option("--informative", synth_spec.informative)->capture_default_str();
    synth->add_option("--noise", synth_spec.noise)->capture_default_str();
    synth->add_option("--flip", synth_spec.flip)->capture_default_str();
    synth->add_option("--seed", synth_spec.seed)->capture_default_str();
    synth->add_option("--output", synth_out, "CSV path")->required();

    app.add_subcommand("config-keys", "list configuration keys and their defaults");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? adatsk::kExitOk : adatsk::kExitUsage;
    }

    return adatsk::run_guarded(
        [&] {
            if (*fsre) {
                adatsk::cmd_fsre(resolve(fsre_flags), std::cout);
            } else if (*tnorms) {
                adatsk::cmd_compare_tnorms(resolve(tnorm_flags), std::cout);
            } else if (*demo) {
                adatsk::cmd_gate_demo(resolve(demo_flags), std::cout);
            } else if (*predict) {
                if (output_path.empty()) {
                    adatsk::cmd_predict(model_path, input_path, std::cout);
                } else {
                    std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
                    if (!out) throw adatsk::UsageError("cannot write '" + output_path + "'");
                    adatsk::cmd_predict(model_path, input_path, out);
                }
            } else if (*synth) {
                adatsk::cmd_synth(synth_spec, synth_out);
            } else {
                std::cout << adatsk::describe_config_keys();
            }
        },
        std::cerr);
}
