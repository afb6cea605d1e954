#include "forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "error.hpp"
#include "io.hpp"
#include "json.hpp"

namespace psim {

void ForestHyperparams::validate() const {
    if (n_trees < 1) throw validation_error("n_trees must be >= 1");
    if (max_depth && *max_depth < 0) throw validation_error("max_depth must be >= 0");
    if (min_samples_leaf < 1) throw validation_error("min_samples_leaf must be >= 1");
    if (min_samples_split < 2) throw validation_error("min_samples_split must be >= 2");
}

void RegressionDataset::add_row(std::span<const double> features, double target) {
    if (features.size() != names_.size()) {
        throw validation_error("row has " + std::to_string(features.size()) + " features, dataset expects " +
                               std::to_string(names_.size()));
    }
    features_.insert(features_.end(), features.begin(), features.end());
    targets_.push_back(target);
}

void RegressionDataset::validate() const {
    if (names_.empty()) throw validation_error("dataset has no features");
    if (targets_.empty()) throw validation_error("dataset is empty");
    for (std::size_t k = 0; k < features_.size(); ++k) {
        if (!std::isfinite(features_[k])) {
            throw validation_error("non-finite feature at row " + std::to_string(k / names_.size()) + ", column '" +
                                   names_[k % names_.size()] + "'");
        }
    }
    for (std::size_t k = 0; k < targets_.size(); ++k) {
        if (!std::isfinite(targets_[k])) throw validation_error("non-finite target at row " + std::to_string(k));
    }
}

const TreeNode& Tree::leaf(std::span<const double> x) const {
    const TreeNode* node = &nodes[0];
    while (!node->is_leaf()) node = &nodes[x[node->feature] < node->threshold ? node->left : node->right];
    return *node;
}

std::size_t Tree::depth() const {
    std::size_t deepest = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const TreeNode& node = nodes[id];
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, d + 1);
            stack.emplace_back(node.right, d + 1);
        }
    }
    return deepest;
}

std::uint64_t tree_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finaliser over a Weyl-sequence offset of the master seed.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Mean that is independent of row order and never leaves [min, max].
double leaf_mean(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    if (values.front() == values.back()) return values.front();
    double sum = 0.0;
    for (double v : values) sum += v;
    return std::clamp(sum / static_cast<double>(values.size()), values.front(), values.back());
}

constexpr int kSplitAttempts = 10;

}  // namespace

Tree grow_tree(const RegressionDataset& data, const ForestHyperparams& hp, std::uint64_t child_seed) {
    std::mt19937_64 rng(child_seed);
    const std::size_t n = data.n_rows();
    const std::size_t nf = data.n_features();

    std::vector<std::size_t> idx(n);
    if (hp.bootstrap) {
        for (auto& k : idx) k = static_cast<std::size_t>(rng() % n);
    } else {
        for (std::size_t k = 0; k < n; ++k) idx[k] = k;
    }

    struct Work {
        int node;
        std::size_t begin, end;
        int depth;
    };
    Tree tree;
    tree.nodes.emplace_back();
    std::vector<Work> stack{{0, 0, n, 0}};
    std::vector<double> lo(nf), hi(nf), scratch;
    std::vector<std::size_t> candidates;

    auto make_leaf = [&](const Work& w) {
        scratch.clear();
        for (std::size_t k = w.begin; k < w.end; ++k) scratch.push_back(data.target(idx[k]));
        TreeNode& node = tree.nodes[w.node];
        node.feature = -1;
        node.value = leaf_mean(scratch);
        node.count = static_cast<int>(w.end - w.begin);
    };

    while (!stack.empty()) {
        const Work w = stack.back();
        stack.pop_back();
        const std::size_t count = w.end - w.begin;

        double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
        for (std::size_t k = w.begin; k < w.end; ++k) {
            const double t = data.target(idx[k]);
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
        if (count < static_cast<std::size_t>(hp.min_samples_split) || tmin == tmax ||
            (hp.max_depth && w.depth >= *hp.max_depth)) {
            make_leaf(w);
            continue;
        }

        std::fill(lo.begin(), lo.end(), std::numeric_limits<double>::infinity());
        std::fill(hi.begin(), hi.end(), -std::numeric_limits<double>::infinity());
        for (std::size_t k = w.begin; k < w.end; ++k) {
            for (std::size_t f = 0; f < nf; ++f) {
                const double x = data.feature(idx[k], f);
                lo[f] = std::min(lo[f], x);
                hi[f] = std::max(hi[f], x);
            }
        }
        candidates.clear();
        for (std::size_t f = 0; f < nf; ++f) {
            if (lo[f] < hi[f]) candidates.push_back(f);
        }
        if (candidates.empty()) {
            make_leaf(w);
            continue;
        }

        bool split = false;
        for (int attempt = 0; attempt < kSplitAttempts && !split; ++attempt) {
            const std::size_t f = candidates[rng() % candidates.size()];
            // Uniform in (lo, hi]; any such threshold separates the extreme rows.
            double threshold = lo[f] + unit_draw(rng) * (hi[f] - lo[f]);
            if (!(threshold > lo[f]) || threshold > hi[f]) threshold = hi[f];

            std::size_t n_left = 0;
            for (std::size_t k = w.begin; k < w.end; ++k) n_left += data.feature(idx[k], f) < threshold;
            const std::size_t n_right = count - n_left;
            if (n_left < static_cast<std::size_t>(hp.min_samples_leaf) ||
                n_right < static_cast<std::size_t>(hp.min_samples_leaf)) {
                continue;
            }
            auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(w.begin),
                                      idx.begin() + static_cast<std::ptrdiff_t>(w.end),
                                      [&](std::size_t r) { return data.feature(r, f) < threshold; });
            const std::size_t split_at = static_cast<std::size_t>(mid - idx.begin());
            const int left = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[w.node];
            node.feature = static_cast<int>(f);
            node.threshold = threshold;
            node.left = left;
            node.right = left + 1;
            // Right is pushed first so the left subtree is expanded (and consumes
            // random draws) first.
            stack.push_back({left + 1, split_at, w.end, w.depth + 1});
            stack.push_back({left, w.begin, split_at, w.depth + 1});
            split = true;
        }
        if (!split) make_leaf(w);
    }
    return tree;
}

ForestModel fit(const RegressionDataset& data, const ForestHyperparams& hp, std::uint64_t seed, int jobs) {
    hp.validate();
    data.validate();
    ForestModel model;
    model.hyperparams = hp;
    model.seed = seed;
    model.feature_names = data.feature_names();
    const auto targets = data.targets();
    const auto [mn, mx] = std::minmax_element(targets.begin(), targets.end());
    model.target_min = *mn;
    model.target_max = *mx;
    model.trees.resize(static_cast<std::size_t>(hp.n_trees));

    const int workers = std::clamp(jobs, 1, hp.n_trees);
    if (workers == 1) {
        for (int t = 0; t < hp.n_trees; ++t) model.trees[t] = grow_tree(data, hp, tree_seed(seed, t));
        return model;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int t = next++; t < hp.n_trees; t = next++) {
                    model.trees[t] = grow_tree(data, hp, tree_seed(seed, t));
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return model;
}

double ForestModel::predict(std::span<const double> features) const {
    if (features.size() != n_features()) {
        throw validation_error("query has " + std::to_string(features.size()) + " features, model expects " +
                               std::to_string(n_features()));
    }
    for (double x : features) {
        if (!std::isfinite(x)) throw validation_error("query contains a non-finite feature");
    }
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Tree& tree : trees) {
        const double v = tree.leaf(features).value;
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return std::clamp(sum / static_cast<double>(trees.size()), lo, hi);
}

std::vector<double> ForestModel::predict_batch(std::span<const double> queries) const {
    const std::size_t nf = n_features();
    if (nf == 0 || queries.size() % nf != 0) throw validation_error("query matrix does not match the feature count");
    std::vector<double> out;
    out.reserve(queries.size() / nf);
    for (std::size_t k = 0; k < queries.size(); k += nf) out.push_back(predict(queries.subspan(k, nf)));
    return out;
}

std::vector<double> ForestModel::predict_batch(const std::vector<std::vector<double>>& queries) const {
    std::vector<double> out;
    out.reserve(queries.size());
    for (const auto& q : queries) out.push_back(predict(q));
    return out;
}

void ForestModel::validate() const {
    hyperparams.validate();
    if (trees.size() != static_cast<std::size_t>(hyperparams.n_trees)) {
        throw parse_error("model has " + std::to_string(trees.size()) + " trees, hyperparameters say " +
                          std::to_string(hyperparams.n_trees));
    }
    if (!(target_min <= target_max)) throw parse_error("model target range is inverted");
    if (feature_names.empty()) throw parse_error("model has no features");
    for (const Tree& tree : trees) {
        const int size = static_cast<int>(tree.nodes.size());
        if (size == 0) throw parse_error("model contains an empty tree");
        std::vector<int> parents(tree.nodes.size(), 0);
        for (int id = 0; id < size; ++id) {
            const TreeNode& node = tree.nodes[id];
            if (node.is_leaf()) {
                if (!std::isfinite(node.value)) throw parse_error("non-finite leaf value");
                continue;
            }
            if (node.feature >= static_cast<int>(feature_names.size())) throw parse_error("split feature out of range");
            // Children are always allocated after their parent, which rules out cycles.
            if (node.left <= id || node.right <= id || node.left >= size || node.right >= size ||
                node.left == node.right) {
                throw parse_error("invalid child index in tree node " + std::to_string(id));
            }
            if (++parents[node.left] > 1 || ++parents[node.right] > 1) throw parse_error("tree node has two parents");
        }
    }
}

namespace {

constexpr int kModelSchemaVersion = 1;

}  // namespace

std::string model_to_json(const ForestModel& model) {
    using nlohmann::json;
    json hp = {{"n_trees", model.hyperparams.n_trees},
               {"max_depth", model.hyperparams.max_depth ? json(*model.hyperparams.max_depth) : json(nullptr)},
               {"min_samples_leaf", model.hyperparams.min_samples_leaf},
               {"min_samples_split", model.hyperparams.min_samples_split},
               {"bootstrap", model.hyperparams.bootstrap}};
    json trees = json::array();
    for (const Tree& tree : model.trees) {
        json nodes = json::array();
        for (const TreeNode& n : tree.nodes) {
            nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.value, n.count}));
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    json doc = {{"schema_version", kModelSchemaVersion},
                {"seed", model.seed},
                {"hyperparams", std::move(hp)},
                {"feature_names", model.feature_names},
                {"target_range", json::array({model.target_min, model.target_max})},
                {"trees", std::move(trees)}};
    return doc.dump();
}

ForestModel model_from_json(std::string_view text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("malformed model JSON: ") + e.what());
    }
    try {
        if (!doc.is_object() || !doc.contains("schema_version")) throw parse_error("model JSON lacks schema_version");
        const int version = doc.at("schema_version").get<int>();
        if (version != kModelSchemaVersion) {
            throw Error(ErrorKind::SchemaMismatch, "model schema_version " + std::to_string(version) +
                                                       " is not supported (expected " +
                                                       std::to_string(kModelSchemaVersion) + ")");
        }
        ForestModel m;
        m.seed = doc.at("seed").get<std::uint64_t>();
        const json& hp = doc.at("hyperparams");
        m.hyperparams.n_trees = hp.at("n_trees").get<int>();
        if (!hp.at("max_depth").is_null()) m.hyperparams.max_depth = hp.at("max_depth").get<int>();
        m.hyperparams.min_samples_leaf = hp.at("min_samples_leaf").get<int>();
        m.hyperparams.min_samples_split = hp.at("min_samples_split").get<int>();
        m.hyperparams.bootstrap = hp.at("bootstrap").get<bool>();
        m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        const json& range = doc.at("target_range");
        m.target_min = range.at(0).get<double>();
        m.target_max = range.at(1).get<double>();
        for (const json& jt : doc.at("trees")) {
            Tree tree;
            for (const json& jn : jt.at("nodes")) {
                if (!jn.is_array() || jn.size() != 6) throw parse_error("tree node must be a 6-element array");
                TreeNode n;
                n.feature = jn[0].get<int>();
                n.threshold = jn[1].get<double>();
                n.left = jn[2].get<int>();
                n.right = jn[3].get<int>();
                n.value = jn[4].get<double>();
                n.count = jn[5].get<int>();
                tree.nodes.push_back(n);
            }
            m.trees.push_back(std::move(tree));
        }
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw parse_error(std::string("invalid model JSON: ") + e.what());
    }
}

void save_model(const ForestModel& model, const std::filesystem::path& path) {
    write_file_atomic(path, model_to_json(model));
}

ForestModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

}  // namespace psim
