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
#include "adatsk/data.hpp"
#include "adatsk/error.hpp"

#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <numeric>
#include <set>
#include <string>

using namespace adatsk;

namespace {

std::filesystem::path scratch(const std::string& name, const std::string& text) {
    const auto dir = std::filesystem::temp_directory_path() / "adatsk_test_data";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << text;
    return path;
}

std::string error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("csv loading") {
    const auto ds = load_csv(scratch("abc.csv", "x,y,class\n1,2,a\n3,4,b\n5,6,a\n"), "class");
    CHECK(ds.size() == 3);
    CHECK(ds.dims() == 2);
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.classes == 2);
    CHECK(ds.class_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.feature_names == std::vector<std::string>{"x", "y"});
    CHECK(ds.features(2, 1) == 6.0);

    const auto middle = load_csv(scratch("mid.csv", "x,label,y\n1,z,2\n\n3,w,4\n"), "label");
    CHECK(middle.feature_names == std::vector<std::string>{"x", "y"});
    CHECK(middle.class_names == std::vector<std::string>{"z", "w"});
    CHECK(middle.features(1, 1) == 4.0);
}

TEST_CASE("csv errors carry locations") {
    const auto nan_msg = error_of([] { load_csv(scratch("nan.csv", "x,class\n1,a\nNaN,b\n"), "class"); });
    CHECK(nan_msg.find("line 3") != std::string::npos);
    const auto text_msg = error_of([] { load_csv(scratch("txt.csv", "x,class\n1,a\nabc,b\n"), "class"); });
    CHECK(text_msg.find("line 3") != std::string::npos);
    CHECK(text_msg.find("'x'") != std::string::npos);
    CHECK(error_of([] { load_csv(scratch("nolabel.csv", "x,y\n1,2\n"), "class"); }).find("class") != std::string::npos);
    CHECK_FALSE(error_of([] { load_csv(scratch("empty.csv", ""), "class"); }).empty());
    CHECK_FALSE(error_of([] { load_csv(scratch("header.csv", "x,class\n"), "class"); }).empty());
    CHECK_FALSE(error_of([] { load_csv(scratch("short.csv", "x,y,class\n1,a\n"), "class"); }).empty());
    CHECK_FALSE(error_of([] { load_csv("/nonexistent/file.csv", "class"); }).empty());
}

TEST_CASE("bundled datasets") {
    const auto iris = load_csv(std::string(ADATSK_DATA_DIR) + "/iris.csv", "species");
    CHECK(iris.size() == 150);
    CHECK(iris.dims() == 4);
    CHECK(iris.classes == 3);
    const auto wine = load_csv(std::string(ADATSK_DATA_DIR) + "/wine.csv", "class");
    CHECK(wine.size() == 178);
    CHECK(wine.dims() == 13);
    CHECK(wine.classes == 3);
}

TEST_CASE("min-max normalization") {
    Matrix train(2, 2);
    train << 2, 7,
             4, 7;
    const auto stats = fit_normalization(train);
    Matrix probe(3, 2);
    probe << 3, 7,
             5, 1,
             2, 9;
    const Matrix out = normalize(probe, stats);
    CHECK(out(0, 0) == 0.5);
    CHECK(out(1, 0) == 1.5);
    CHECK(out(2, 0) == 0.0);
    CHECK(out.col(1).isZero());
    for (Eigen::Index d = 0; d < stats.scale.size(); ++d) CHECK(stats.scale(d) >= 0.0);
}

TEST_CASE("z-score normalization") {
    Matrix train(4, 1);
    train << 1, 2, 3, 4;
    const auto stats = fit_normalization(train, NormalizationMode::zscore);
    const Matrix out = normalize(train, stats);
    CHECK(out.mean() == doctest::Approx(0.0).scale(1.0));
    CHECK(std::sqrt(out.array().square().mean()) == doctest::Approx(1.0));
    CHECK(parse_normalization_mode("zscore") == NormalizationMode::zscore);
    CHECK_THROWS_AS(parse_normalization_mode("robust"), InvalidArgument);
}

TEST_CASE("normalized training data spans the unit interval") {
    const auto iris = load_csv(std::string(ADATSK_DATA_DIR) + "/iris.csv", "species");
    const Matrix x = normalize(iris.features, fit_normalization(iris.features));
    for (Eigen::Index d = 0; d < x.cols(); ++d) {
        CHECK(x.col(d).minCoeff() == 0.0);
        CHECK(x.col(d).maxCoeff() == 1.0);
    }
}

TEST_CASE("one-hot encoding") {
    const std::vector<int> one{2};
    CHECK(one_hot(one, 3) == (Matrix(1, 3) << 0, 0, 1).finished());
    const std::vector<int> two{0, 1};
    CHECK(one_hot(two, 2) == Matrix::Identity(2, 2));
    const std::vector<int> many{0, 2, 1, 1, 2};
    const Matrix t = one_hot(many, 3);
    for (Eigen::Index n = 0; n < t.rows(); ++n) {
        CHECK(t.row(n).sum() == 1.0);
        Eigen::Index arg = 0;
        t.row(n).maxCoeff(&arg);
        CHECK(arg == many[static_cast<std::size_t>(n)]);
    }
    const std::vector<int> bad{3};
    CHECK_THROWS_AS(one_hot(bad, 3), InvalidArgument);
}

TEST_CASE("stratified folds") {
    std::vector<int> labels(150);
    for (std::size_t i = 0; i < 150; ++i) labels[i] = static_cast<int>(i / 50);
    const auto folds = kfold_split(labels, 3, 10, 42);
    CHECK(folds.size() == 150);
    for (std::size_t f = 0; f < 10; ++f) {
        std::array<int, 3> per_class{};
        for (std::size_t i = 0; i < 150; ++i) {
            if (folds[i] == f) ++per_class[static_cast<std::size_t>(labels[i])];
        }
        CHECK(per_class == std::array<int, 3>{5, 5, 5});
    }
    CHECK(kfold_split(labels, 3, 10, 42) == folds);
    CHECK(kfold_split(labels, 3, 10, 43) != folds);

    const auto loo = kfold_split(labels, 3, 150, 1);
    CHECK(std::set<std::size_t>(loo.begin(), loo.end()).size() == 150);

    std::vector<int> uneven{0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2};
    const auto f3 = kfold_split(uneven, 3, 4, 9);
    std::array<int, 4> sizes{};
    for (auto f : f3) {
        REQUIRE(f < 4);
        ++sizes[f];
    }
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    CHECK_THROWS_AS(kfold_split(uneven, 3, 18, 0), InvalidArgument);
}

TEST_CASE("seeded shuffle is a deterministic permutation") {
    std::vector<std::size_t> a(100);
    std::iota(a.begin(), a.end(), std::size_t{0});
    auto b = a;
    seeded_shuffle(a, 5);
    seeded_shuffle(b, 5);
    CHECK(a == b);
    CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 100);
    auto c = b;
    std::iota(c.begin(), c.end(), std::size_t{0});
    seeded_shuffle(c, 6);
    CHECK(c != a);
}

TEST_CASE("dataset views") {
    const auto ds = load_csv(scratch("view.csv", "x,y,z,class\n1,2,3,a\n4,5,6,b\n7,8,9,a\n"), "class");
    const std::vector<std::size_t> rows{2, 0};
    const auto sub = ds.subset(rows);
    CHECK(sub.size() == 2);
    CHECK(sub.features(0, 0) == 7.0);
    CHECK(sub.labels == std::vector<int>{0, 0});
    CHECK(sub.classes == 2);
    const std::vector<std::size_t> cols{2, 0};
    const auto sel = ds.select_features(cols);
    CHECK(sel.feature_names == std::vector<std::string>{"z", "x"});
    CHECK(sel.features(1, 0) == 6.0);
}

TEST_CASE("synthetic generator") {
    SyntheticSpec spec;
    spec.samples = 40;
    spec.features = 300;
    spec.seed = 3;
    const auto a = make_synthetic(spec);
    const auto b = make_synthetic(spec);
    CHECK(a.size() == 40);
    CHECK(a.dims() == 300);
    CHECK(a.classes == 2);
    CHECK(a.features == b.features);
    CHECK(a.labels == b.labels);
    CHECK(a.features.allFinite());
    CHECK(a.feature_names[0] == "sig0");
    CHECK(a.feature_names[299] == "bg299");
    spec.seed = 4;
    CHECK(make_synthetic(spec).features != a.features);
}
