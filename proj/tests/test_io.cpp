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
#include "adatsk/error.hpp"
#include "adatsk/io.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

using namespace adatsk;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("adatsk_test_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig parse(const std::string& text, const fs::path& base = {}) {
    std::istringstream in(text);
    return parse_run_config(in, base);
}

} // namespace

TEST_CASE("config defaults and overrides") {
    const auto c = parse("dataset = d.csv\n", "/base");
    CHECK(c.dataset == fs::path("/base/d.csv"));
    CHECK(c.label_column == "class");
    CHECK(c.train.eta == 0.01);
    CHECK(!c.train.iters_fs.has_value());
    CHECK(c.train.tnorm.kind == TNormKind::ada_softmin);
    CHECK(c.folds == 10);
    CHECK(c.repeats == 1);
    CHECK(c.out == fs::path("/base/out"));

    const auto o = parse(
        "# comment line\n"
        "dataset = /abs/x.csv   # trailing comment\n"
        "label_column = species\n"
        "eta = 0.1\n"
        "iters_fs = 50\n"
        "iters_ft = auto\n"
        "tnorm = softmin\n"
        "softmin_q = -20\n"
        "gate = exp-sq\n"
        "fine_tune = lse\n"
        "freeze_centers = true\n"
        "zeta_lambda = 0.25\n"
        "folds = 5\n"
        "repeats = 3\n"
        "normalization = zscore\n"
        "out = /tmp/somewhere\n",
        "/base");
    CHECK(o.dataset == fs::path("/abs/x.csv"));
    CHECK(o.label_column == "species");
    CHECK(o.train.eta == 0.1);
    CHECK(o.train.iters_fs == 50);
    CHECK(!o.train.iters_ft.has_value());
    CHECK(o.train.tnorm.kind == TNormKind::softmin);
    CHECK(o.train.tnorm.q == -20);
    CHECK(o.train.gate_kind == math::GateKind::exp_sq);
    CHECK(o.train.fine_tune == FineTuneMode::lse);
    CHECK(o.train.freeze_centers == true);
    CHECK(o.train.zeta_lambda == 0.25);
    CHECK(o.folds == 5);
    CHECK(o.repeats == 3);
    CHECK(o.normalization == NormalizationMode::zscore);
    CHECK(o.out == fs::path("/tmp/somewhere"));
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse("dataset = d.csv\nbogus = 1\n"), UsageError);
    CHECK_THROWS_AS(parse("dataset = d.csv\neta = fast\n"), UsageError);
    CHECK_THROWS_AS(parse("dataset = d.csv\niters_fs = -3\n"), UsageError);
    CHECK_THROWS_AS(parse("dataset = d.csv\ntnorm = lukasiewicz\n"), UsageError);
    CHECK_THROWS_AS(parse("dataset = d.csv\nfolds = 1\n"), UsageError);
    CHECK_THROWS_AS(parse("dataset = d.csv\nrepeats = 0\n"), UsageError);
    CHECK_THROWS_AS(parse("dataset d.csv\n"), UsageError);
    CHECK_THROWS_AS(parse("eta = 0.1\n"), UsageError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/adatsk.conf"), UsageError);
    try {
        parse("dataset = d.csv\nbogus = 1\n");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
}

TEST_CASE("config key listing") {
    const auto text = describe_config_keys();
    for (const char* key : {"dataset", "eta", "tnorm", "folds", "zeta_theta", "fine_tune"}) {
        CAPTURE(std::string(key));
        CHECK(text.find(key) != std::string::npos);
    }
}

TEST_CASE("model round trip") {
    const Dataset iris = load_csv(std::string(ADATSK_DATA_DIR) + "/iris.csv", "species");
    TrainConfig c;
    c.eta = 0.1;
    c.iters_fs = c.iters_re = c.iters_ft = 100;
    const auto fitted = fit(iris, c, Method::fsre);
    const auto dir = scratch_dir("model");
    save_classifier(fitted.classifier, dir / "model.json");
    const auto loaded = load_classifier(dir / "model.json");
    CHECK(loaded.feature_names == fitted.classifier.feature_names);
    CHECK(loaded.feature_columns == fitted.classifier.feature_columns);
    CHECK(loaded.class_names == fitted.classifier.class_names);
    CHECK(loaded.model.consequents == fitted.classifier.model.consequents);
    CHECK(loaded.model.partition.centers == fitted.classifier.model.partition.centers);
    CHECK(loaded.outputs(iris.select_features(loaded.feature_columns).features) ==
          fitted.classifier.outputs(iris.select_features(loaded.feature_columns).features));
    CHECK(loaded.predict_full(iris.features) == fitted.classifier.predict_full(iris.features));
    CHECK(slurp(dir / "model.json").find("adatsk-model") != std::string::npos);

    auto j = classifier_to_json(fitted.classifier);
    j["format"] = "other";
    CHECK_THROWS_AS(classifier_from_json(j), ParseError);
    j = classifier_to_json(fitted.classifier);
    j["consequents"].erase(0);
    CHECK_THROWS_AS(classifier_from_json(j), ParseError);
    j = classifier_to_json(fitted.classifier);
    j.erase("partition");
    CHECK_THROWS_AS(classifier_from_json(j), ParseError);

    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK_THROWS_AS(load_classifier(dir / "broken.json"), ParseError);
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("trajectory csv") {
    Matrix t(2, 3);
    t << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
    const auto dir = scratch_dir("traj");
    write_trajectory_csv(t, {"a", "b", "c"}, dir / "g.csv");
    CHECK(slurp(dir / "g.csv") == "iteration,a,b,c\n1,0.1,0.2,0.3\n2,0.4,0.5,0.6\n");
    CHECK_THROWS_AS(write_trajectory_csv(t, {"a"}, dir / "h.csv"), InvalidArgument);
}

TEST_CASE("report json") {
    PipelineReport r;
    r.folds = 2;
    r.repeats = 1;
    r.runs = {{0, 0, 0.9, 1.0, 3, 7, 0.1, 0.2, 0.3}, {0, 1, 0.8, 0.95, 2, 5, 0.1, 0.2, 0.3}};
    r.mean_accuracy = 0.85;
    r.mean_selected_features = 2.5;
    r.mean_rules = 6.0;
    const auto a = report_to_json(r);
    CHECK(a["runs"].size() == 2);
    CHECK(a["runs"][1]["rules"] == 5);
    CHECK(a.dump().find("seconds") == std::string::npos);
    r.runs[0].seconds_fs = 42.0;
    CHECK(report_to_json(r).dump() == a.dump());
    CHECK(timing_to_json(r).dump().find("42") != std::string::npos);
}

TEST_CASE("unwritable output") {
    const auto dir = scratch_dir("unwritable");
    std::ofstream(dir / "file") << "x";
    CHECK_THROWS_AS(ensure_writable_dir(dir / "file" / "sub"), UsageError);
    CHECK_THROWS_AS(write_text(dir / "file" / "x.txt", "hello"), UsageError);
    ensure_writable_dir(dir / "nested" / "ok");
    CHECK(fs::is_directory(dir / "nested" / "ok"));
}
