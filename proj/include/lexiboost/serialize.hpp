#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "lexiboost/data.hpp"
#include "lexiboost/ensemble.hpp"
#include "lexiboost/metrics.hpp"

namespace lexiboost {

using Json = nlohmann::ordered_json;

Json hypothesis_to_json(const WeakHypothesis& h);
WeakHypothesis hypothesis_from_json(const Json& j, std::size_t class_count, std::size_t dimension);

/// Model file: class_count, class_names, dimension, alpha and components.
/// Reals are written with round-trip precision, so load(save(m)) == m.
Json ensemble_to_json(const Ensemble& ens);
Ensemble ensemble_from_json(const Json& j);

void save_model(const Ensemble& ens, const std::filesystem::path& path);
Ensemble load_model(const std::filesystem::path& path);

Json report_to_json(const EvaluationReport& rep);

/// Generator metadata written next to synthetic CSV files.
Json source_to_json(const GaussianSource& src, const std::vector<std::size_t>& class_sizes);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);
void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

} // namespace lexiboost
