#include "lexiboost/serialize.hpp"

#include <fstream>

#include "lexiboost/error.hpp"

namespace lexiboost {

namespace {

constexpr int kModelVersion = 1;

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("model file is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model field '") + key + "' has the wrong type: " + e.what());
  }
}

} // namespace

Json hypothesis_to_json(const WeakHypothesis& h) {
  Json j;
  j["kind"] = to_string(h.kind());
  if (const auto* s = std::get_if<StumpModel>(&h.model())) {
    j["feature"] = s->feature;
    j["threshold"] = s->threshold;
    j["left"] = s->left;
    j["right"] = s->right;
  } else if (const auto* t = std::get_if<TreeModel>(&h.model())) {
    j["max_depth"] = t->max_depth;
    Json nodes = Json::array();
    for (const auto& n : t->nodes) {
      Json node;
      node["leaf"] = n.leaf;
      node["feature"] = n.feature;
      node["threshold"] = n.threshold;
      node["left"] = n.left;
      node["right"] = n.right;
      node["label"] = n.label;
      nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
  } else {
    const auto& k = std::get<KnnModel>(h.model());
    j["k"] = k.k;
    j["features"] = k.features;
    j["labels"] = k.labels;
    j["weights"] = k.weights;
    j["source_index"] = k.source_index;
  }
  return j;
}

WeakHypothesis hypothesis_from_json(const Json& j, std::size_t class_count, std::size_t dimension) {
  const auto kind = learner_kind_from_string(field<std::string>(j, "kind"));
  auto check_class = [&](ClassIndex c) {
    if (c >= class_count) throw DataError("component predicts an unknown class");
    return c;
  };
  switch (kind) {
    case LearnerKind::Stump: {
      StumpModel s{field<std::size_t>(j, "feature"), field<double>(j, "threshold"),
                   check_class(field<ClassIndex>(j, "left")), check_class(field<ClassIndex>(j, "right"))};
      if (s.feature >= dimension) throw DataError("stump feature out of range");
      return WeakHypothesis(s, class_count, dimension);
    }
    case LearnerKind::Tree: {
      TreeModel t;
      t.max_depth = field<std::size_t>(j, "max_depth");
      for (const auto& n : field<Json>(j, "nodes")) {
        TreeNode node{field<bool>(n, "leaf"), field<std::size_t>(n, "feature"), field<double>(n, "threshold"),
                      field<std::size_t>(n, "left"), field<std::size_t>(n, "right"),
                      check_class(field<ClassIndex>(n, "label"))};
        t.nodes.push_back(node);
      }
      if (t.nodes.empty()) throw DataError("tree has no nodes");
      for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const auto& n = t.nodes[i];
        if (!n.leaf && (n.feature >= dimension || n.left <= i || n.right <= i || n.left >= t.nodes.size() ||
                        n.right >= t.nodes.size()))
          throw DataError("malformed tree node");
      }
      return WeakHypothesis(std::move(t), class_count, dimension);
    }
    case LearnerKind::Knn: {
      KnnModel k;
      k.k = field<std::size_t>(j, "k");
      k.features = field<std::vector<double>>(j, "features");
      k.labels = field<std::vector<ClassIndex>>(j, "labels");
      k.weights = field<std::vector<double>>(j, "weights");
      k.source_index = field<std::vector<std::size_t>>(j, "source_index");
      if (k.features.size() != k.labels.size() * dimension || k.weights.size() != k.labels.size() ||
          k.source_index.size() != k.labels.size() || k.k < 1)
        throw DataError("malformed kNN component");
      for (auto c : k.labels) check_class(c);
      return WeakHypothesis(std::move(k), class_count, dimension);
    }
  }
  throw DataError("unknown component kind");
}

Json ensemble_to_json(const Ensemble& ens) {
  Json j;
  j["format"] = "lexiboost-model";
  j["version"] = kModelVersion;
  j["class_count"] = ens.class_count;
  j["class_names"] = ens.class_names;
  j["dimension"] = ens.components.empty() ? 0 : ens.components.front().dimension();
  j["alpha"] = ens.alpha;
  Json comps = Json::array();
  for (const auto& h : ens.components) comps.push_back(hypothesis_to_json(h));
  j["components"] = std::move(comps);
  return j;
}

Ensemble ensemble_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", std::string()) != "lexiboost-model")
    throw DataError("not a lexiboost model file");
  if (field<int>(j, "version") != kModelVersion) throw DataError("unsupported model version");
  Ensemble e;
  e.class_count = field<std::size_t>(j, "class_count");
  e.class_names = field<std::vector<std::string>>(j, "class_names");
  e.alpha = field<std::vector<double>>(j, "alpha");
  if (e.class_names.size() != e.class_count) throw DataError("class name count mismatch");
  const auto dim = field<std::size_t>(j, "dimension");
  for (const auto& c : field<Json>(j, "components"))
    e.components.push_back(hypothesis_from_json(c, e.class_count, dim));
  e.validate();
  return e;
}

void save_model(const Ensemble& ens, const std::filesystem::path& path) {
  write_json(ensemble_to_json(ens), path);
}

Ensemble load_model(const std::filesystem::path& path) { return ensemble_from_json(read_json(path)); }

Json report_to_json(const EvaluationReport& rep) {
  Json j;
  j["n_test"] = rep.n_test;
  j["confusion"] = rep.confusion;
  j["recalls"] = rep.recalls;
  j["accuracy"] = rep.accuracy;
  j["g_mean"] = rep.g_mean;
  if (rep.auc) j["auc"] = *rep.auc;
  if (rep.avg_auc) j["avg_auc"] = *rep.avg_auc;
  if (!rep.warnings.empty()) j["warnings"] = rep.warnings;
  return j;
}

Json source_to_json(const GaussianSource& src, const std::vector<std::size_t>& class_sizes) {
  Json j;
  j["generator"] = "gaussian";
  j["dimension"] = src.dimension;
  j["seed"] = src.seed;
  j["centers"] = src.centers;
  j["class_sizes"] = class_sizes;
  if (src.spec) {
    Json s;
    s["total_size"] = src.spec->total_size;
    s["imbalance_ratio"] = src.spec->imbalance_ratio;
    s["majority_center"] = src.spec->majority_center;
    s["outlier_rate"] = src.spec->outlier_rate;
    s["seed"] = src.spec->seed;
    s["dimension"] = src.spec->dimension;
    j["spec"] = std::move(s);
  }
  j["outlier_rate"] = src.outlier_rate;
  if (src.outlier_rate > 0.0) {
    j["outlier_seed"] = src.outlier_seed;
    std::vector<std::size_t> counts;
    for (const auto& r : src.replaced) counts.push_back(r.size());
    j["replaced_per_class"] = counts;
    j["replaced"] = src.replaced;
  }
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << dump(j);
  if (!out) throw DataError("failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + " is not valid JSON: " + e.what());
  }
}

} // namespace lexiboost
