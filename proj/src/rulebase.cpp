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
#include "adatsk/rulebase.hpp"

#include "adatsk/error.hpp"

#include <string>

namespace adatsk {

std::string_view to_string(RuleBaseKind kind) {
    switch (kind) {
    case RuleBaseKind::coco:
        return "coco";
    case RuleBaseKind::fuco:
        return "fuco";
    case RuleBaseKind::en:
        return "en";
    }
    return "unknown";
}

RuleBaseKind parse_rule_base_kind(std::string_view name) {
    if (name == "coco") return RuleBaseKind::coco;
    if (name == "fuco") return RuleBaseKind::fuco;
    if (name == "en") return RuleBaseKind::en;
    throw InvalidArgument("unknown rule base kind '" + std::string(name) + "'");
}

IndexMatrix::IndexMatrix(std::size_t rows, std::size_t cols, std::vector<int> entries, RuleBaseKind kind)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), kind_(kind) {
    if (entries_.size() != rows_ * cols_) {
        throw InvalidArgument("IndexMatrix: entry count does not match shape");
    }
}

IndexMatrix IndexMatrix::select_rows(std::span<const std::size_t> keep) const {
    std::vector<int> out;
    out.reserve(keep.size() * cols_);
    for (std::size_t r : keep) {
        if (r >= rows_) {
            throw InvalidArgument("IndexMatrix::select_rows: row " + std::to_string(r) + " out of range");
        }
        auto src = row(r);
        out.insert(out.end(), src.begin(), src.end());
    }
    return IndexMatrix(keep.size(), cols_, std::move(out), kind_);
}

namespace {

void require_positive(std::size_t sets, std::size_t features, const char* who) {
    if (sets == 0 || features == 0) {
        throw InvalidArgument(std::string(who) + ": S and D must be positive");
    }
}

} // namespace

IndexMatrix build_coco(std::size_t sets, std::size_t features) {
    require_positive(sets, features, "build_coco");
    std::vector<int> entries;
    entries.reserve(sets * features);
    for (std::size_t s = 1; s <= sets; ++s) {
        entries.insert(entries.end(), features, static_cast<int>(s));
    }
    return IndexMatrix(sets, features, std::move(entries), RuleBaseKind::coco);
}

IndexMatrix build_fuco(std::size_t sets, std::size_t features) {
    require_positive(sets, features, "build_fuco");
    std::size_t rows = 1;
    for (std::size_t d = 0; d < features; ++d) {
        if (rows > kFuCoRowLimit / sets) {
            throw CapacityError("build_fuco: S^D exceeds the limit of " + std::to_string(kFuCoRowLimit) + " rules");
        }
        rows *= sets;
    }
    std::vector<int> entries(rows * features);
    std::vector<int> tuple(features, 1);
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy(tuple.begin(), tuple.end(), entries.begin() + static_cast<std::ptrdiff_t>(r * features));
        // Odometer increment, last column fastest.
        for (std::size_t d = features; d-- > 0;) {
            if (++tuple[d] <= static_cast<int>(sets)) break;
            tuple[d] = 1;
        }
    }
    return IndexMatrix(rows, features, std::move(entries), RuleBaseKind::fuco);
}

IndexMatrix build_enfrb(std::size_t sets, std::size_t features) {
    if (sets < 2) {
        throw InvalidArgument("build_enfrb: need at least 2 fuzzy sets per feature");
    }
    require_positive(sets, features, "build_enfrb");
    const int S = static_cast<int>(sets);
    const std::size_t rows = (2 * features + 1) * sets;
    std::vector<int> entries;
    entries.reserve(rows * features);

    auto emit = [&](int base, std::size_t pos, int value) {
        for (std::size_t d = 0; d < features; ++d) {
            entries.push_back(d == pos ? value : base);
        }
    };
    for (int s = 1; s <= S; ++s) {
        emit(s, features, s);
        const int below = s == 1 ? S : s - 1;
        for (std::size_t d = 0; d < features; ++d) emit(s, d, below);
        const int above = s == S ? 1 : s + 1;
        for (std::size_t d = 0; d < features; ++d) emit(s, d, above);
    }
    return IndexMatrix(rows, features, std::move(entries), RuleBaseKind::en);
}

FuzzyPartition place_centers(const Matrix& train_features, std::size_t sets) {
    if (sets == 0) {
        throw InvalidArgument("place_centers: S must be positive");
    }
    if (train_features.rows() == 0) {
        throw InvalidArgument("place_centers: empty training set");
    }
    const Eigen::Index D = train_features.cols();
    FuzzyPartition partition;
    partition.centers.resize(D, static_cast<Eigen::Index>(sets));
    for (Eigen::Index d = 0; d < D; ++d) {
        const double lo = train_features.col(d).minCoeff();
        const double hi = train_features.col(d).maxCoeff();
        if (sets == 1) {
            partition.centers(d, 0) = lo + 0.5 * (hi - lo);
            continue;
        }
        const double step = (hi - lo) / static_cast<double>(sets - 1);
        for (std::size_t s = 0; s < sets; ++s) {
            partition.centers(d, static_cast<Eigen::Index>(s)) = lo + step * static_cast<double>(s);
        }
        partition.centers(d, static_cast<Eigen::Index>(sets - 1)) = hi;
    }
    return partition;
}

ConsequentBank::ConsequentBank(std::size_t rules, std::size_t features, std::size_t classes)
    : rules_(rules), features_(features), classes_(classes),
      data_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rules * (features + 1)), static_cast<Eigen::Index>(classes))) {}

ConsequentBank ConsequentBank::select_rules(std::span<const std::size_t> keep) const {
    ConsequentBank out(keep.size(), features_, classes_);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] >= rules_) {
            throw InvalidArgument("ConsequentBank::select_rules: rule index out of range");
        }
        out.rule(i) = rule(keep[i]);
    }
    return out;
}

ConsequentBank init_consequents(std::size_t rules, std::size_t features, std::size_t classes) {
    return ConsequentBank(rules, features, classes);
}

} // namespace adatsk
