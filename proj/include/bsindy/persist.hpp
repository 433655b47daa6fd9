#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsindy/csv.hpp"
#include "bsindy/diagnostics.hpp"
#include "bsindy/library.hpp"
#include "bsindy/mcmc.hpp"
#include "bsindy/sindy.hpp"

namespace bsindy {

using Json = nlohmann::ordered_json;

inline constexpr int kChainFormatVersion = 1;

/// A chain together with what is needed to interpret its columns.
struct StoredChain {
  Chain chain;
  std::string equation;
  BasisSpec basis;
  std::vector<std::string> warnings;  ///< non-fatal findings while loading
};

/// Columns: iter, alpha[<label>]..., w[<label>]..., xi[<label>]..., sigma2.
Table chain_table(const Chain& chain, const std::vector<std::string>& labels);

Json chain_config_json(const ChainConfig& cfg);
ChainConfig chain_config_from_json(const Json& j);

/// Writes `<stem>.csv` and the `<stem>.json` sidecar (format version, labels, basis,
/// sampler settings, seed, acceptance).
void write_chain(const std::filesystem::path& dir, const std::string& stem, const Chain& chain,
                 const BasisSpec& basis, const std::string& equation);

/// Reads a chain written by write_chain. `path` is the CSV, the sidecar, or the stem.
/// Throws IoError for missing, corrupt or mismatched files. A CSV holding fewer rows
/// than the sidecar records is accepted with a warning.
StoredChain read_chain(const std::filesystem::path& path);

Json report_json(const FitReport& report, const std::vector<std::string>& labels);
Json stls_json(const StlsResult& result, const std::vector<std::string>& labels);

/// One table per state variable: t, mean, lower, upper.
Table band_table(const PredictiveEnsemble& ens, Eigen::Index var);

/// Columns: lo, hi, count.
Table histogram_table(std::span<const double> values, int bins);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

}  // namespace bsindy
