#pragma once

// Tab-separated file formats.
//
//   matrix   gene_id<TAB>sample...          one row per gene, full-precision decimals
//   labels   sample_id<TAB>class            class is 0 (control) or 1 (treatment)
//   GMT      name<TAB>description<TAB>gene...
//
// All text is UTF-8 with LF line endings. Missing values (NA) are rejected.
// Writers go through a temporary file that is renamed into place.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgsa/baselines.hpp"
#include "bgsa/evaluation.hpp"
#include "bgsa/model.hpp"
#include "bgsa/sampler.hpp"
#include "bgsa/simgen.hpp"

namespace bgsa::io {

namespace fs = std::filesystem;

// Shortest decimal string that parses back to exactly `x`.
std::string format_exact(double x);
// Rounded to `digits` significant digits.
std::string format_sig(double x, int digits = 4);

void write_text_atomic(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

ExpressionDataset read_matrix(const fs::path& matrix_path, const fs::path& labels_path);
void write_matrix(const ExpressionDataset& data, const fs::path& matrix_path, const fs::path& labels_path);

struct GmtLoadReport {
    std::size_t sets_read = 0;
    std::size_t dropped_genes = 0;  // gene memberships not found in the dataset
    std::size_t dropped_sets = 0;   // sets left with fewer than 2 genes
    std::size_t duplicate_genes = 0;
};

GeneSetCollection parse_gmt(const fs::path& path, const ExpressionDataset& data, GmtLoadReport* report = nullptr);
void write_gmt(const GeneSetCollection& sets, const ExpressionDataset& data, const fs::path& path);

nlohmann::json truth_to_json(const SimulationTruth& truth);
SimulationTruth truth_from_json(const nlohmann::json& j);
void write_truth(const SimulationTruth& truth, const fs::path& path);
SimulationTruth read_truth(const fs::path& path);

// Set-level table, sorted by prob_null ascending then mean_tau_sq descending.
// With `flagged_only`, sets above the cutoff are left out.
std::string format_set_table(const PosteriorSummary& summary, double cutoff, bool flagged_only = false);
std::string format_gene_table(const PosteriorSummary& summary);
std::string format_baseline_table(const BaselineResult& result);
std::string format_benchmark_table(const BenchmarkReport& report);
std::string format_roc_table(const BenchmarkReport& report);
nlohmann::json benchmark_to_json(const BenchmarkReport& report);

struct ResultFiles {
    fs::path sets;
    fs::path genes;
};

ResultFiles write_results(const PosteriorSummary& summary, const fs::path& dir, double cutoff,
                          bool flagged_only = false);
fs::path write_results(const BaselineResult& result, const fs::path& dir);
std::vector<fs::path> write_results(const BenchmarkReport& report, const fs::path& dir);

nlohmann::json to_json(const McmcConfig& cfg);
McmcConfig mcmc_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SamplerDiagnostics& diag);

// Library and dependency versions recorded in run metadata.
nlohmann::json version_info();

void write_json(const nlohmann::json& j, const fs::path& path);
nlohmann::json read_json(const fs::path& path);

}  // namespace bgsa::io
