#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "axdse/accel.hpp"
#include "axdse/library.hpp"
#include "axdse/quality.hpp"
#include "axdse/synth.hpp"

namespace axdse {

// ---------------------------------------------------------------------------
// Step 2: QoR and hardware-cost estimation models.
//
// Feature vectors are taken from the circuits a configuration assigns:
// per-node WMED for the QoR model, per-node (area, power, delay) for the
// hardware model. Models are compared and selected by fidelity - the
// fraction of configuration pairs whose estimates stand in the same order
// relation as the ground truth - not by accuracy.
// ---------------------------------------------------------------------------

enum class Engine { Naive, Linear, Knn, DecisionTree, RandomForest };

inline const char* engine_name(Engine e) {
  switch (e) {
    case Engine::Naive: return "naive";
    case Engine::Linear: return "linear";
    case Engine::Knn: return "knn";
    case Engine::DecisionTree: return "decision_tree";
    case Engine::RandomForest: return "random_forest";
  }
  return "?";
}

inline Engine engine_from_name(const std::string& s) {
  for (Engine e : {Engine::Naive, Engine::Linear, Engine::Knn, Engine::DecisionTree,
                   Engine::RandomForest})
    if (s == engine_name(e)) return e;
  throw UserError("unknown learning engine: '" + s + "'");
}

// Simplicity order used to break fidelity ties.
inline int engine_rank(Engine e) { return static_cast<int>(e); }

enum class FeatureMode { Qor, Hw };

inline const char* feature_mode_name(FeatureMode m) { return m == FeatureMode::Qor ? "qor" : "hw"; }

// Per-node, per-library-entry feature columns; configurations are vectors of
// indexes into the reduced libraries.
class FeatureTable {
 public:
  FeatureTable() = default;
  FeatureTable(const ReducedLibrary& reduced, const Catalog& catalog) {
    node_ids_.reserve(reduced.nodes.size());
    for (const auto& node : reduced.nodes) {
      node_ids_.push_back(node.node_id);
      std::vector<double> wmed, area, power, delay;
      for (const auto& e : node.entries) {
        const AxCircuit& c = catalog.by_id(e.id);
        wmed.push_back(e.wmed);
        area.push_back(c.chr.area);
        power.push_back(c.chr.power);
        delay.push_back(c.chr.delay);
      }
      wmed_.push_back(std::move(wmed));
      area_.push_back(std::move(area));
      power_.push_back(std::move(power));
      delay_.push_back(std::move(delay));
    }
  }

  std::size_t nodes() const { return node_ids_.size(); }
  const std::vector<std::string>& node_ids() const { return node_ids_; }

  int dim(FeatureMode mode) const {
    return mode == FeatureMode::Qor ? int(nodes()) : 3 * int(nodes());
  }

  void extract(const std::vector<std::uint16_t>& config, FeatureMode mode, double* out) const {
    if (mode == FeatureMode::Qor) {
      for (std::size_t k = 0; k < nodes(); ++k) out[k] = wmed_[k][config[k]];
    } else {
      for (std::size_t k = 0; k < nodes(); ++k) {
        out[3 * k] = area_[k][config[k]];
        out[3 * k + 1] = power_[k][config[k]];
        out[3 * k + 2] = delay_[k][config[k]];
      }
    }
  }

  std::vector<double> extract(const std::vector<std::uint16_t>& config, FeatureMode mode) const {
    std::vector<double> out(dim(mode));
    extract(config, mode, out.data());
    return out;
  }

 private:
  std::vector<std::string> node_ids_;
  std::vector<std::vector<double>> wmed_, area_, power_, delay_;
};

// ------------------------------- fidelity ----------------------------------

struct TieEps {
  enum class Kind { Absolute, Relative } kind = Kind::Absolute;
  double eps = 0;

  static TieEps qor() { return {Kind::Absolute, 1e-9}; }
  static TieEps hw() { return {Kind::Relative, 1e-6}; }

  int relation(double a, double b) const {
    double tol = kind == Kind::Absolute ? eps : eps * std::max(std::abs(a), std::abs(b));
    if (std::abs(a - b) <= tol) return 0;
    return a < b ? -1 : 1;
  }
};

// Fraction of unordered pairs whose estimates order the same way as the
// truths. Invariant under strictly increasing transforms of the estimates.
inline double fidelity(const std::vector<double>& estimates, const std::vector<double>& truths,
                       const TieEps& ties) {
  if (estimates.size() != truths.size())
    throw UserError("fidelity: length mismatch (" + std::to_string(estimates.size()) + " vs " +
                    std::to_string(truths.size()) + ")");
  if (estimates.size() < 2) throw UserError("fidelity: need at least two values");
  std::size_t n = estimates.size();
  std::uint64_t agree = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      int re = ties.relation(estimates[i], estimates[j]);
      int rt = ties.relation(truths[i], truths[j]);
      agree += re == rt ? 1 : 0;
      ++total;
    }
  return double(agree) / double(total);
}

// ------------------------------ model engines ------------------------------

struct FitParams {
  int trees = 100;       // random forest size
  int min_leaf = 2;      // CART minimum samples per leaf
  int knn_k = 5;
  int max_features = 0;  // per-split columns for the forest; 0 = ceil(d/3)
  bool bootstrap = true;
  std::uint64_t seed = 1;
};

namespace detail {

struct TreeNode {
  int feat = -1;  // -1 marks a leaf
  double threshold = 0;
  int left = -1, right = -1;
  double value = 0;
};

class Cart {
 public:
  std::vector<TreeNode> nodes;

  double predict(const double* x) const {
    int i = 0;
    while (nodes[i].feat >= 0) i = x[nodes[i].feat] <= nodes[i].threshold ? nodes[i].left
                                                                          : nodes[i].right;
    return nodes[i].value;
  }

  // Variance-reduction splits; `max_features` columns tried per node (all
  // for a plain decision tree), sampled from rng when restricted.
  static Cart fit(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                  const std::vector<std::size_t>& sample, int min_leaf, int max_features,
                  std::mt19937_64* rng) {
    Cart tree;
    std::vector<std::size_t> indices = sample;
    tree.build(X, y, indices, 0, indices.size(), min_leaf, max_features, rng);
    return tree;
  }

 private:
  // Builds the subtree over indices[begin, end); partitions in place.
  int build(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
            std::vector<std::size_t>& idx, std::size_t begin, std::size_t end, int min_leaf,
            int max_features, std::mt19937_64* rng) {
    std::size_t n = end - begin;
    double sum = 0, sum_sq = 0;
    for (std::size_t i = begin; i < end; ++i) {
      sum += y[idx[i]];
      sum_sq += y[idx[i]] * y[idx[i]];
    }
    double mean = sum / double(n);
    double sse = sum_sq - sum * sum / double(n);
    int me = int(nodes.size());
    nodes.push_back(TreeNode{-1, 0, -1, -1, mean});
    if (n < std::size_t(2 * min_leaf) || sse <= 1e-12) return me;

    int d = int(X[idx[begin]].size());
    std::vector<int> feats(d);
    std::iota(feats.begin(), feats.end(), 0);
    if (max_features < d && rng) {
      for (int k = 0; k < max_features; ++k) {
        std::uniform_int_distribution<int> pick(k, d - 1);
        std::swap(feats[k], feats[pick(*rng)]);
      }
      feats.resize(max_features);
    }

    int best_feat = -1;
    double best_thr = 0, best_sse = sse - 1e-12;
    std::vector<std::pair<double, double>> vals(n);  // (feature, label)
    for (int f : feats) {
      for (std::size_t i = 0; i < n; ++i)
        vals[i] = {X[idx[begin + i]][f], y[idx[begin + i]]};
      std::sort(vals.begin(), vals.end());
      double lsum = 0, lsq = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        lsum += vals[i].second;
        lsq += vals[i].second * vals[i].second;
        if (vals[i].first == vals[i + 1].first) continue;
        std::size_t nl = i + 1, nr = n - nl;
        if (nl < std::size_t(min_leaf) || nr < std::size_t(min_leaf)) continue;
        double rsum = sum - lsum, rsq = sum_sq - lsq;
        double split_sse = (lsq - lsum * lsum / double(nl)) + (rsq - rsum * rsum / double(nr));
        if (split_sse < best_sse) {
          best_sse = split_sse;
          best_feat = f;
          best_thr = vals[i].first + (vals[i + 1].first - vals[i].first) / 2;
        }
      }
    }
    if (best_feat < 0) return me;

    auto mid_it = std::partition(idx.begin() + begin, idx.begin() + end,
                                 [&](std::size_t s) { return X[s][best_feat] <= best_thr; });
    std::size_t mid = std::size_t(mid_it - idx.begin());
    if (mid == begin || mid == end) return me;  // numeric edge, keep the leaf
    nodes[me].feat = best_feat;
    nodes[me].threshold = best_thr;
    nodes[me].left = build(X, y, idx, begin, mid, min_leaf, max_features, rng);
    nodes[me].right = build(X, y, idx, mid, end, min_leaf, max_features, rng);
    return me;
  }
};

}  // namespace detail

// A fitted estimation model; engine-tagged state, serializable to JSON.
class TrainedModel {
 public:
  Engine engine = Engine::Naive;
  FeatureMode mode = FeatureMode::Qor;
  FitParams params;

  // fitted state (one populated per engine)
  std::vector<double> beta;                 // linear
  std::vector<detail::Cart> trees;          // decision tree / forest
  std::vector<double> feat_mean, feat_sd;   // knn standardization
  std::vector<std::vector<double>> knn_x;   // knn training features
  std::vector<double> knn_y;

  double predict(const double* x) const {
    switch (engine) {
      case Engine::Naive: {
        // Closed-form baselines: -sum(WMED) for QoR, sum of areas for HW.
        double s = 0;
        if (mode == FeatureMode::Qor) {
          for (std::size_t k = 0; k < naive_dim_; ++k) s -= x[k];
        } else {
          for (std::size_t k = 0; k < naive_dim_; k += 3) s += x[k];
        }
        return s;
      }
      case Engine::Linear: {
        double s = beta[0];
        for (std::size_t k = 1; k < beta.size(); ++k) s += beta[k] * x[k - 1];
        return s;
      }
      case Engine::Knn: return knn_predict(x);
      case Engine::DecisionTree: return trees[0].predict(x);
      case Engine::RandomForest: {
        double s = 0;
        for (const auto& t : trees) s += t.predict(x);
        return s / double(trees.size());
      }
    }
    return 0;
  }

  double predict(const std::vector<double>& x) const { return predict(x.data()); }

  static TrainedModel naive(FeatureMode mode, int dim) {
    TrainedModel m;
    m.engine = Engine::Naive;
    m.mode = mode;
    m.naive_dim_ = std::size_t(dim);
    return m;
  }

  static TrainedModel fit(Engine engine, FeatureMode mode,
                          const std::vector<std::vector<double>>& X,
                          const std::vector<double>& y, const FitParams& params = {}) {
    if (engine != Engine::Naive && X.size() < 10)
      throw UserError("model fitting needs at least 10 samples, got " +
                      std::to_string(X.size()));
    if (X.size() != y.size()) throw UserError("feature/label count mismatch");
    TrainedModel m;
    m.engine = engine;
    m.mode = mode;
    m.params = params;
    int d = X.empty() ? 0 : int(X[0].size());
    switch (engine) {
      case Engine::Naive:
        m.naive_dim_ = std::size_t(d);
        break;
      case Engine::Linear:
        m.beta = fit_linear(X, y);
        break;
      case Engine::DecisionTree: {
        std::vector<std::size_t> all(X.size());
        std::iota(all.begin(), all.end(), 0);
        m.trees.push_back(detail::Cart::fit(X, y, all, params.min_leaf, d, nullptr));
        break;
      }
      case Engine::RandomForest: {
        int max_features =
            params.max_features > 0 ? params.max_features : std::max(1, (d + 2) / 3);
        m.trees.resize(params.trees);
        parallel_for(std::size_t(params.trees), [&](std::size_t t) {
          std::mt19937_64 rng(derive_seed(params.seed, t));
          std::vector<std::size_t> sample(X.size());
          if (params.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, X.size() - 1);
            for (auto& s : sample) s = pick(rng);
            std::sort(sample.begin(), sample.end());
          } else {
            std::iota(sample.begin(), sample.end(), 0);
          }
          m.trees[t] = detail::Cart::fit(X, y, sample, params.min_leaf, max_features, &rng);
        });
        break;
      }
      case Engine::Knn: {
        m.feat_mean.assign(d, 0);
        m.feat_sd.assign(d, 0);
        for (const auto& row : X)
          for (int k = 0; k < d; ++k) m.feat_mean[k] += row[k];
        for (int k = 0; k < d; ++k) m.feat_mean[k] /= double(X.size());
        for (const auto& row : X)
          for (int k = 0; k < d; ++k) {
            double c = row[k] - m.feat_mean[k];
            m.feat_sd[k] += c * c;
          }
        for (int k = 0; k < d; ++k) {
          m.feat_sd[k] = std::sqrt(m.feat_sd[k] / double(X.size()));
          if (m.feat_sd[k] == 0) m.feat_sd[k] = 1;
        }
        m.knn_x.resize(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) {
          m.knn_x[i].resize(d);
          for (int k = 0; k < d; ++k) m.knn_x[i][k] = (X[i][k] - m.feat_mean[k]) / m.feat_sd[k];
        }
        m.knn_y = y;
        break;
      }
    }
    return m;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["engine"] = engine_name(engine);
    j["mode"] = feature_mode_name(mode);
    j["params"] = {{"trees", params.trees},       {"min_leaf", params.min_leaf},
                   {"knn_k", params.knn_k},       {"max_features", params.max_features},
                   {"bootstrap", params.bootstrap}, {"seed", params.seed}};
    switch (engine) {
      case Engine::Naive:
        j["dim"] = naive_dim_;
        break;
      case Engine::Linear:
        j["beta"] = beta;
        break;
      case Engine::DecisionTree:
      case Engine::RandomForest: {
        nlohmann::json jt = nlohmann::json::array();
        for (const auto& tree : trees) {
          nlohmann::json jn = nlohmann::json::array();
          for (const auto& n : tree.nodes)
            jn.push_back({n.feat, n.threshold, n.left, n.right, n.value});
          jt.push_back(std::move(jn));
        }
        j["trees"] = std::move(jt);
        break;
      }
      case Engine::Knn:
        j["mean"] = feat_mean;
        j["sd"] = feat_sd;
        j["x"] = knn_x;
        j["y"] = knn_y;
        break;
    }
    return j;
  }

  static TrainedModel from_json(const nlohmann::json& j) {
    TrainedModel m;
    m.engine = engine_from_name(j.at("engine").get<std::string>());
    m.mode = j.at("mode").get<std::string>() == "qor" ? FeatureMode::Qor : FeatureMode::Hw;
    const auto& p = j.at("params");
    m.params.trees = p.at("trees").get<int>();
    m.params.min_leaf = p.at("min_leaf").get<int>();
    m.params.knn_k = p.at("knn_k").get<int>();
    m.params.max_features = p.at("max_features").get<int>();
    m.params.bootstrap = p.at("bootstrap").get<bool>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    switch (m.engine) {
      case Engine::Naive:
        m.naive_dim_ = j.at("dim").get<std::size_t>();
        break;
      case Engine::Linear:
        m.beta = j.at("beta").get<std::vector<double>>();
        break;
      case Engine::DecisionTree:
      case Engine::RandomForest:
        for (const auto& jt : j.at("trees")) {
          detail::Cart tree;
          for (const auto& jn : jt)
            tree.nodes.push_back(detail::TreeNode{jn[0].get<int>(), jn[1].get<double>(),
                                                  jn[2].get<int>(), jn[3].get<int>(),
                                                  jn[4].get<double>()});
          m.trees.push_back(std::move(tree));
        }
        break;
      case Engine::Knn:
        m.feat_mean = j.at("mean").get<std::vector<double>>();
        m.feat_sd = j.at("sd").get<std::vector<double>>();
        m.knn_x = j.at("x").get<std::vector<std::vector<double>>>();
        m.knn_y = j.at("y").get<std::vector<double>>();
        break;
    }
    return m;
  }

 private:
  std::size_t naive_dim_ = 0;

  double knn_predict(const double* x) const {
    int d = int(feat_mean.size());
    std::vector<double> q(d);
    for (int k = 0; k < d; ++k) q[k] = (x[k] - feat_mean[k]) / feat_sd[k];
    std::vector<std::pair<double, std::size_t>> dist(knn_x.size());
    for (std::size_t i = 0; i < knn_x.size(); ++i) {
      double s = 0;
      for (int k = 0; k < d; ++k) {
        double c = q[k] - knn_x[i][k];
        s += c * c;
      }
      dist[i] = {s, i};
    }
    std::size_t k = std::min<std::size_t>(params.knn_k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    // Exact feature matches dominate: average their labels.
    double exact_sum = 0;
    int exact_n = 0;
    for (std::size_t i = 0; i < k; ++i)
      if (dist[i].first <= 1e-24) {
        exact_sum += knn_y[dist[i].second];
        ++exact_n;
      }
    if (exact_n > 0) return exact_sum / exact_n;
    double wsum = 0, vsum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      double w = 1.0 / std::sqrt(dist[i].first);
      wsum += w;
      vsum += w * knn_y[dist[i].second];
    }
    return vsum / wsum;
  }

  // Least squares with intercept via normal equations and a tiny ridge.
  static std::vector<double> fit_linear(const std::vector<std::vector<double>>& X,
                                        const std::vector<double>& y) {
    int d = int(X[0].size()) + 1;
    std::vector<double> ata(std::size_t(d) * d, 0), aty(d, 0);
    auto at = [&](int r, int c) -> double& { return ata[std::size_t(r) * d + c]; };
    for (std::size_t i = 0; i < X.size(); ++i) {
      std::vector<double> row(d);
      row[0] = 1;
      for (int k = 1; k < d; ++k) row[k] = X[i][k - 1];
      for (int r = 0; r < d; ++r) {
        aty[r] += row[r] * y[i];
        for (int c = r; c < d; ++c) at(r, c) += row[r] * row[c];
      }
    }
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < r; ++c) at(r, c) = at(c, r);
    double ridge = 1e-10;
    for (int attempt = 0; attempt < 8; ++attempt, ridge *= 100) {
      std::vector<double> m = ata, rhs = aty;
      auto mm = [&](int r, int c) -> double& { return m[std::size_t(r) * d + c]; };
      for (int r = 0; r < d; ++r) mm(r, r) += ridge;
      // Cholesky
      bool ok = true;
      for (int r = 0; r < d && ok; ++r) {
        for (int c = 0; c <= r; ++c) {
          double s = mm(r, c);
          for (int k = 0; k < c; ++k) s -= mm(r, k) * mm(c, k);
          if (r == c) {
            if (s <= 0) { ok = false; break; }
            mm(r, r) = std::sqrt(s);
          } else {
            mm(r, c) = s / mm(c, c);
          }
        }
      }
      if (!ok) continue;
      for (int r = 0; r < d; ++r) {
        double s = rhs[r];
        for (int k = 0; k < r; ++k) s -= mm(r, k) * rhs[k];
        rhs[r] = s / mm(r, r);
      }
      for (int r = d - 1; r >= 0; --r) {
        double s = rhs[r];
        for (int k = r + 1; k < d; ++k) s -= mm(k, r) * rhs[k];
        rhs[r] = s / mm(r, r);
      }
      return rhs;
    }
    throw std::runtime_error("linear fit: normal equations not positive definite");
  }
};

// The closed-form baselines from the methodology comparison.
inline std::pair<TrainedModel, TrainedModel> naive_models(int node_count) {
  return {TrainedModel::naive(FeatureMode::Hw, 3 * node_count),
          TrainedModel::naive(FeatureMode::Qor, node_count)};
}

// ------------------------------ labeled samples -----------------------------

struct LabeledSample {
  std::vector<std::uint16_t> config;  // reduced-library indexes per node
  double qor = 0;
  double area = 0, delay = 0, power = 0;
};

inline Configuration to_configuration(const ReducedLibrary& reduced,
                                      const std::vector<std::uint16_t>& config) {
  Configuration cfg;
  cfg.circuit_ids.reserve(config.size());
  for (std::size_t k = 0; k < config.size(); ++k)
    cfg.circuit_ids.push_back(reduced.nodes[k].entries[config[k]].id);
  return cfg;
}

// Uniform per-node draws from the reduced libraries, labeled with ground
// truth (protocol QoR and flat-netlist cost). Deterministic in `seed`.
inline std::vector<LabeledSample> sample_training_set(const AccelGraph& g,
                                                      const ReducedLibrary& reduced,
                                                      const Catalog& catalog,
                                                      const QorEvaluator& evaluator,
                                                      std::size_t count, std::uint64_t seed) {
  if (count < 1) throw UserError("sample count must be at least 1");
  std::vector<LabeledSample> samples(count);
  std::mt19937_64 rng(seed);
  for (auto& s : samples) {
    s.config.resize(reduced.nodes.size());
    for (std::size_t k = 0; k < reduced.nodes.size(); ++k) {
      std::uniform_int_distribution<std::size_t> pick(0, reduced.nodes[k].entries.size() - 1);
      s.config[k] = std::uint16_t(pick(rng));
    }
  }
  parallel_for(count, [&](std::size_t i) {
    Configuration cfg = to_configuration(reduced, samples[i].config);
    samples[i].qor = evaluator.mean_ssim(cfg);
    HwCost hc = hw_cost(g, cfg, catalog);
    samples[i].area = hc.area;
    samples[i].delay = hc.delay;
    samples[i].power = hc.power;
  });
  return samples;
}

inline void save_samples(const std::filesystem::path& path, const ReducedLibrary& reduced,
                         const std::vector<LabeledSample>& samples) {
  CsvWriter out(path);
  std::vector<std::string> header;
  for (const auto& node : reduced.nodes) header.push_back(node.node_id);
  header.insert(header.end(), {"qor", "area", "delay", "power"});
  out.row(header);
  for (const auto& s : samples) {
    std::vector<std::string> row;
    for (std::size_t k = 0; k < s.config.size(); ++k)
      row.push_back(reduced.nodes[k].entries[s.config[k]].id);
    row.push_back(format_double(s.qor));
    row.push_back(format_double(s.area));
    row.push_back(format_double(s.delay));
    row.push_back(format_double(s.power));
    out.row(row);
  }
}

inline std::vector<LabeledSample> load_samples(const std::filesystem::path& path,
                                               const ReducedLibrary& reduced) {
  CsvTable table = read_csv(path);
  std::vector<LabeledSample> samples;
  int n = int(reduced.nodes.size());
  int col_qor = table.column("qor"), col_area = table.column("area");
  int col_delay = table.column("delay"), col_power = table.column("power");
  for (const auto& row : table.rows) {
    LabeledSample s;
    s.config.resize(n);
    for (int k = 0; k < n; ++k) {
      const auto& entries = reduced.nodes[k].entries;
      auto it = std::find_if(entries.begin(), entries.end(),
                             [&](const ScoredCircuit& e) { return e.id == row[k]; });
      if (it == entries.end())
        throw UserError("sample references circuit " + row[k] + " not in reduced library of " +
                        reduced.nodes[k].node_id);
      s.config[k] = std::uint16_t(it - entries.begin());
    }
    s.qor = parse_double(row[col_qor]);
    s.area = parse_double(row[col_area]);
    s.delay = parse_double(row[col_delay]);
    s.power = parse_double(row[col_power]);
    samples.push_back(std::move(s));
  }
  return samples;
}

// ------------------------------ model selection -----------------------------

struct EngineScore {
  Engine engine;
  double train_fidelity = 0;
  double test_fidelity = 0;
};

struct SelectionResult {
  TrainedModel best;
  EngineScore best_score{Engine::Naive, 0, 0};
  std::vector<EngineScore> table;
};

// Fits every candidate engine, scores fidelity on the held-out set, and keeps
// the best test fidelity (ties to the simpler engine).
inline SelectionResult select_model(const std::vector<Engine>& engines, FeatureMode mode,
                                    const FeatureTable& features,
                                    const std::vector<LabeledSample>& train,
                                    const std::vector<LabeledSample>& test,
                                    const TieEps& ties, const FitParams& params = {}) {
  if (engines.empty()) throw UserError("select_model: no candidate engines");
  auto label_of = [&](const LabeledSample& s) { return mode == FeatureMode::Qor ? s.qor : s.area; };
  auto matrix = [&](const std::vector<LabeledSample>& set) {
    std::vector<std::vector<double>> X(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) X[i] = features.extract(set[i].config, mode);
    return X;
  };
  std::vector<std::vector<double>> Xtrain = matrix(train), Xtest = matrix(test);
  std::vector<double> ytrain(train.size()), ytest(test.size());
  for (std::size_t i = 0; i < train.size(); ++i) ytrain[i] = label_of(train[i]);
  for (std::size_t i = 0; i < test.size(); ++i) ytest[i] = label_of(test[i]);

  SelectionResult result;
  bool have_best = false;
  for (Engine e : engines) {
    TrainedModel model = TrainedModel::fit(e, mode, Xtrain, ytrain, params);
    auto predict_all = [&](const std::vector<std::vector<double>>& X) {
      std::vector<double> out(X.size());
      for (std::size_t i = 0; i < X.size(); ++i) out[i] = model.predict(X[i]);
      return out;
    };
    EngineScore score{e, fidelity(predict_all(Xtrain), ytrain, ties),
                      fidelity(predict_all(Xtest), ytest, ties)};
    result.table.push_back(score);
    bool better = !have_best || score.test_fidelity > result.best_score.test_fidelity ||
                  (score.test_fidelity == result.best_score.test_fidelity &&
                   engine_rank(e) < engine_rank(result.best_score.engine));
    if (better) {
      result.best = std::move(model);
      result.best_score = score;
      have_best = true;
    }
  }
  return result;
}

}  // namespace axdse
