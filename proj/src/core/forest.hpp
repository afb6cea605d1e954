/// @file forest.hpp
/// @brief Ensemble of randomized regression trees with purely random splits.
///
/// Splits never score impurity: a node picks a feature uniformly among those
/// that still vary across its rows, then a threshold uniformly inside that
/// feature's range. Leaves store the mean target, and a forest prediction is the
/// mean over trees, so predictions always stay within the training target range.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psim {

struct ForestHyperparams {
    int n_trees = 200;
    std::optional<int> max_depth;  ///< empty = unlimited
    int min_samples_leaf = 1;
    int min_samples_split = 2;
    bool bootstrap = false;

    void validate() const;
    friend bool operator==(const ForestHyperparams&, const ForestHyperparams&) = default;
};

/// Dense row-major feature matrix plus one target per row.
class RegressionDataset {
public:
    RegressionDataset() = default;
    explicit RegressionDataset(std::vector<std::string> feature_names) : names_(std::move(feature_names)) {}

    void add_row(std::span<const double> features, double target);

    const std::vector<std::string>& feature_names() const { return names_; }
    std::size_t n_features() const { return names_.size(); }
    std::size_t n_rows() const { return targets_.size(); }
    std::span<const double> row(std::size_t k) const { return {&features_[k * names_.size()], names_.size()}; }
    double feature(std::size_t k, std::size_t f) const { return features_[k * names_.size() + f]; }
    double target(std::size_t k) const { return targets_[k]; }
    std::span<const double> targets() const { return targets_; }

    /// Throws a validation error if empty, non-finite, or without features.
    void validate() const;

private:
    std::vector<std::string> names_;
    std::vector<double> features_;
    std::vector<double> targets_;
};

struct TreeNode {
    int feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  ///< leaf mean
    int count = 0;       ///< leaf row count

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root

    /// Leaf reached by `x`; `feature < threshold` goes left.
    const TreeNode& leaf(std::span<const double> x) const;
    std::size_t depth() const;
};

class ForestModel {
public:
    ForestHyperparams hyperparams;
    std::uint64_t seed = 0;
    std::vector<Tree> trees;
    std::vector<std::string> feature_names;
    double target_min = 0.0;
    double target_max = 0.0;

    double predict(std::span<const double> features) const;
    /// Row-major queries, `n_features()` values each.
    std::vector<double> predict_batch(std::span<const double> queries) const;
    std::vector<double> predict_batch(const std::vector<std::vector<double>>& queries) const;

    std::size_t n_features() const { return feature_names.size(); }
    /// Structural checks used after loading.
    void validate() const;
};

/// Seed for tree `index`, a fixed 64-bit mix of (seed, index).
std::uint64_t tree_seed(std::uint64_t seed, std::uint64_t index);

/// Builds one tree. Depends only on (data, hp, child_seed).
Tree grow_tree(const RegressionDataset& data, const ForestHyperparams& hp, std::uint64_t child_seed);

/// Trees are built on up to `jobs` threads; the result does not depend on `jobs`.
ForestModel fit(const RegressionDataset& data, const ForestHyperparams& hp, std::uint64_t seed, int jobs = 1);

void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);
std::string model_to_json(const ForestModel& model);
ForestModel model_from_json(std::string_view text);

}  // namespace psim
