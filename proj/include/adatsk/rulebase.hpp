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

// Rule-base structure: index matrices for the compact (CoCo), fully combined
// (FuCo) and enhanced (En) rule bases, Gaussian center placement, and the
// first-order consequent parameter store.

#include "adatsk/types.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace adatsk {

enum class RuleBaseKind { coco, fuco, en };

std::string_view to_string(RuleBaseKind kind);
RuleBaseKind parse_rule_base_kind(std::string_view name);

/// R x D table; entry (r, d) is the 1-based fuzzy-set index used by rule r on
/// feature d.
class IndexMatrix {
public:
    IndexMatrix() = default;
    IndexMatrix(std::size_t rows, std::size_t cols, std::vector<int> entries, RuleBaseKind kind);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    RuleBaseKind kind() const noexcept { return kind_; }

    int operator()(std::size_t r, std::size_t d) const { return entries_[r * cols_ + d]; }
    std::span<const int> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

    /// Rule base restricted to the given rows, in the given order.
    IndexMatrix select_rows(std::span<const std::size_t> keep) const;

    friend bool operator==(const IndexMatrix&, const IndexMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<int> entries_;
    RuleBaseKind kind_ = RuleBaseKind::coco;
};

/// Upper bound on S^D accepted by build_fuco.
inline constexpr std::size_t kFuCoRowLimit = 1'000'000;

IndexMatrix build_coco(std::size_t sets, std::size_t features);
IndexMatrix build_fuco(std::size_t sets, std::size_t features);
IndexMatrix build_enfrb(std::size_t sets, std::size_t features);

/// Per-feature Gaussian centers; the spread is fixed at 1.
struct FuzzyPartition {
    /// D x S; centers(d, s) is the center of (0-based) set s on feature d.
    Matrix centers;

    std::size_t features() const noexcept { return static_cast<std::size_t>(centers.rows()); }
    std::size_t sets() const noexcept { return static_cast<std::size_t>(centers.cols()); }

    /// Center used by rule r on feature d.
    double center(const IndexMatrix& rules, std::size_t r, std::size_t d) const {
        return centers(static_cast<Eigen::Index>(d), rules(r, d) - 1);
    }
};

/// S centers per feature, evenly spaced on [min_d, max_d] of the (normalized)
/// training features. S = 1 puts the single center at the midpoint.
FuzzyPartition place_centers(const Matrix& train_features, std::size_t sets);

/// First-order TSK consequents p(r, j, c) with j = 0 the bias and j = d + 1
/// the coefficient of feature d.
class ConsequentBank {
public:
    ConsequentBank() = default;
    ConsequentBank(std::size_t rules, std::size_t features, std::size_t classes);

    std::size_t rules() const noexcept { return rules_; }
    std::size_t features() const noexcept { return features_; }
    std::size_t classes() const noexcept { return classes_; }

    double& operator()(std::size_t r, std::size_t j, std::size_t c) {
        return data_(static_cast<Eigen::Index>(r * (features_ + 1) + j), static_cast<Eigen::Index>(c));
    }
    double operator()(std::size_t r, std::size_t j, std::size_t c) const {
        return data_(static_cast<Eigen::Index>(r * (features_ + 1) + j), static_cast<Eigen::Index>(c));
    }

    /// (D+1) x C coefficient block of rule r.
    auto rule(std::size_t r) { return data_.middleRows(static_cast<Eigen::Index>(r * (features_ + 1)), static_cast<Eigen::Index>(features_ + 1)); }
    auto rule(std::size_t r) const { return data_.middleRows(static_cast<Eigen::Index>(r * (features_ + 1)), static_cast<Eigen::Index>(features_ + 1)); }

    /// All coefficients stacked rule after rule: R(D+1) x C.
    Eigen::MatrixXd& data() noexcept { return data_; }
    const Eigen::MatrixXd& data() const noexcept { return data_; }

    ConsequentBank select_rules(std::span<const std::size_t> keep) const;

    friend bool operator==(const ConsequentBank& a, const ConsequentBank& b) {
        return a.rules_ == b.rules_ && a.features_ == b.features_ && a.classes_ == b.classes_ && a.data_ == b.data_;
    }

private:
    std::size_t rules_ = 0;
    std::size_t features_ = 0;
    std::size_t classes_ = 0;
    Eigen::MatrixXd data_;
};

/// All-zero bank of shape R x (D+1) x C.
ConsequentBank init_consequents(std::size_t rules, std::size_t features, std::size_t classes);

} // namespace adatsk
