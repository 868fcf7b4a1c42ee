#include "bgsa/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <system_error>
#include <unordered_map>
#include <unordered_set>

#include <boost/version.hpp>
#include <unistd.h>

#include "bgsa/errors.hpp"
#include "bgsa/version.hpp"

namespace bgsa::io {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find('\t', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

// Splits text into lines, dropping a trailing CR on each and a final empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        auto line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        start = pos + 1;
    }
    return out;
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

std::string where(const fs::path& path, std::size_t line) {
    return path.string() + ":" + std::to_string(line);
}

double parse_cell(std::string_view cell, const fs::path& path, std::size_t line, std::size_t column) {
    double x = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (cell.empty() || ec != std::errc{} || ptr != last || !std::isfinite(x)) {
        throw InputError(where(path, line) + ": column " + std::to_string(column) + ": '" + std::string(cell) +
                         "' is not a finite number");
    }
    return x;
}

std::string tsv_row(std::initializer_list<std::string> cells) {
    std::string out;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out += '\t';
        out += c;
        first = false;
    }
    out += '\n';
    return out;
}

}  // namespace

std::string format_exact(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string format_sig(double x, int digits) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, digits);
    return {buf, res.ptr};
}

void write_text_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("failed writing " + path.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot move " + tmp.string() + " to " + path.string());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExpressionDataset read_matrix(const fs::path& matrix_path, const fs::path& labels_path) {
    const std::string text = read_text(matrix_path);
    const auto lines = split_lines(text);
    if (lines.empty() || blank(lines[0])) throw InputError(matrix_path.string() + ": empty matrix file");

    ExpressionDataset data;
    const auto header = split_tabs(lines[0]);
    if (header.size() < 2) throw InputError(where(matrix_path, 1) + ": header needs gene_id and sample columns");
    std::unordered_set<std::string> seen_samples;
    for (std::size_t c = 1; c < header.size(); ++c) {
        std::string id(header[c]);
        if (id.empty()) throw InputError(where(matrix_path, 1) + ": empty sample id in column " + std::to_string(c + 1));
        if (!seen_samples.insert(id).second) {
            throw InputError(where(matrix_path, 1) + ": duplicate sample id '" + id + "'");
        }
        data.sample_ids.push_back(std::move(id));
    }
    const std::size_t n = data.sample_ids.size();

    std::vector<double> values;
    std::unordered_set<std::string> seen_genes;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        if (lines[l].empty()) continue;
        const auto cells = split_tabs(lines[l]);
        if (cells.size() != n + 1) {
            throw InputError(where(matrix_path, l + 1) + ": expected " + std::to_string(n + 1) + " columns, found " +
                             std::to_string(cells.size()));
        }
        std::string id(cells[0]);
        if (id.empty()) throw InputError(where(matrix_path, l + 1) + ": empty gene id");
        if (!seen_genes.insert(id).second) {
            throw InputError(where(matrix_path, l + 1) + ": duplicate gene id '" + id + "'");
        }
        data.gene_ids.push_back(std::move(id));
        for (std::size_t c = 1; c <= n; ++c) values.push_back(parse_cell(cells[c], matrix_path, l + 1, c + 1));
    }
    if (data.gene_ids.empty()) throw InputError(matrix_path.string() + ": no gene rows");
    data.values = Matrix(data.gene_ids.size(), n);
    std::copy(values.begin(), values.end(), data.values.data().begin());

    // Labels: sample_id<TAB>{0|1}, optional header line, any order.
    const std::string ltext = read_text(labels_path);
    const auto llines = split_lines(ltext);
    std::unordered_map<std::string, std::uint8_t> label_of;
    for (std::size_t l = 0; l < llines.size(); ++l) {
        if (llines[l].empty()) continue;
        const auto cells = split_tabs(llines[l]);
        if (cells.size() != 2) {
            throw InputError(where(labels_path, l + 1) + ": expected 2 columns, found " + std::to_string(cells.size()));
        }
        if (cells[1] != "0" && cells[1] != "1") {
            if (l == 0) continue;  // header
            throw InputError(where(labels_path, l + 1) + ": class must be 0 or 1, found '" + std::string(cells[1]) + "'");
        }
        std::string id(cells[0]);
        if (!seen_samples.count(id)) {
            throw InputError(where(labels_path, l + 1) + ": unknown sample id '" + id + "'");
        }
        if (!label_of.emplace(id, cells[1] == "1" ? 1 : 0).second) {
            throw InputError(where(labels_path, l + 1) + ": duplicate sample id '" + id + "'");
        }
    }
    for (const auto& id : data.sample_ids) {
        const auto it = label_of.find(id);
        if (it == label_of.end()) throw InputError(labels_path.string() + ": no class label for sample '" + id + "'");
        data.class_labels.push_back(it->second);
    }
    data.validate();
    return data;
}

void write_matrix(const ExpressionDataset& data, const fs::path& matrix_path, const fs::path& labels_path) {
    std::string m = "gene_id";
    for (const auto& s : data.sample_ids) m += '\t' + s;
    m += '\n';
    for (std::size_t g = 0; g < data.n_genes(); ++g) {
        m += data.gene_ids[g];
        for (double x : data.values.row(g)) m += '\t' + format_exact(x);
        m += '\n';
    }
    std::string l = "sample_id\tclass\n";
    for (std::size_t i = 0; i < data.n_samples(); ++i) {
        l += data.sample_ids[i] + '\t' + (data.class_labels[i] ? "1" : "0") + '\n';
    }
    write_text_atomic(matrix_path, m);
    write_text_atomic(labels_path, l);
}

GeneSetCollection parse_gmt(const fs::path& path, const ExpressionDataset& data, GmtLoadReport* report) {
    const std::string text = read_text(path);
    const auto lines = split_lines(text);
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t g = 0; g < data.gene_ids.size(); ++g) index.emplace(data.gene_ids[g], g);

    GmtLoadReport rep;
    GeneSetCollection out;
    std::unordered_set<std::string> names;
    for (std::size_t l = 0; l < lines.size(); ++l) {
        if (blank(lines[l])) continue;
        const auto cells = split_tabs(lines[l]);
        if (cells.size() < 3) {
            throw InputError(where(path, l + 1) + ": a gene set line needs a name, a description and genes");
        }
        std::string name(cells[0]);
        if (name.empty()) throw InputError(where(path, l + 1) + ": empty gene set name");
        if (!names.insert(name).second) throw InputError(where(path, l + 1) + ": duplicate gene set '" + name + "'");
        ++rep.sets_read;

        std::vector<std::size_t> members;
        std::unordered_set<std::size_t> in_set;
        for (std::size_t c = 2; c < cells.size(); ++c) {
            if (cells[c].empty()) continue;
            const auto it = index.find(cells[c]);
            if (it == index.end()) {
                ++rep.dropped_genes;
                continue;
            }
            if (!in_set.insert(it->second).second) {
                ++rep.duplicate_genes;
                continue;
            }
            members.push_back(it->second);
        }
        if (members.size() < 2) {
            ++rep.dropped_sets;
            continue;
        }
        out.sets.push_back(std::move(members));
        out.names.push_back(std::move(name));
    }
    if (rep.sets_read == 0) throw InputError(path.string() + ": no gene sets");
    if (report) *report = rep;
    return out;
}

void write_gmt(const GeneSetCollection& sets, const ExpressionDataset& data, const fs::path& path) {
    std::string out;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        out += sets.names[s] + "\tna";
        for (auto g : sets.sets[s]) out += '\t' + data.gene_ids.at(g);
        out += '\n';
    }
    write_text_atomic(path, out);
}

json truth_to_json(const SimulationTruth& truth) {
    json shifted = json::array();
    for (const auto& set : truth.shifted_genes) {
        json genes = json::array();
        for (const auto& sg : set) genes.push_back({{"gene", sg.gene}, {"shift", sg.shift}});
        shifted.push_back(std::move(genes));
    }
    json pairs = json::array();
    for (const auto& p : truth.correlated_pairs) pairs.push_back({{"first", p.first}, {"second", p.second}, {"rho", p.rho}});
    return {{"scenario", to_string(truth.scenario)},
            {"seed", truth.seed},
            {"positive_sets", truth.positive_sets},
            {"shifted_genes", std::move(shifted)},
            {"correlated_pairs", std::move(pairs)}};
}

SimulationTruth truth_from_json(const json& j) {
    try {
        SimulationTruth t;
        t.scenario = parse_scenario(j.at("scenario").get<std::string>());
        t.seed = j.at("seed").get<std::uint64_t>();
        t.positive_sets = j.at("positive_sets").get<std::vector<std::size_t>>();
        for (const auto& set : j.at("shifted_genes")) {
            std::vector<ShiftedGene> genes;
            for (const auto& g : set) genes.push_back({g.at("gene").get<std::size_t>(), g.at("shift").get<double>()});
            t.shifted_genes.push_back(std::move(genes));
        }
        for (const auto& p : j.at("correlated_pairs")) {
            t.correlated_pairs.push_back(
                {p.at("first").get<std::size_t>(), p.at("second").get<std::size_t>(), p.at("rho").get<double>()});
        }
        return t;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed truth file: ") + e.what());
    }
}

void write_truth(const SimulationTruth& truth, const fs::path& path) { write_json(truth_to_json(truth), path); }

SimulationTruth read_truth(const fs::path& path) { return truth_from_json(read_json(path)); }

std::string format_set_table(const PosteriorSummary& summary, double cutoff, bool flagged_only) {
    std::vector<std::size_t> order(summary.sets.size());
    std::iota(order.begin(), order.end(), 0);
    // Missing prob_null (simple variant) sorts as 1.
    auto pnull = [&](std::size_t s) { return summary.sets[s].prob_null.value_or(1.0); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pnull(a) != pnull(b)) return pnull(a) < pnull(b);
        return summary.sets[a].mean_tau_sq > summary.sets[b].mean_tau_sq;
    });
    std::string out = tsv_row({"set_name", "n_genes", "mean_tau_sq", "prob_null", "flagged"});
    for (auto s : order) {
        const auto& set = summary.sets[s];
        const bool flagged = set.prob_null && *set.prob_null <= cutoff;
        if (flagged_only && !flagged) continue;
        out += tsv_row({set.name, std::to_string(set.size), format_sig(set.mean_tau_sq),
                        set.prob_null ? format_sig(*set.prob_null) : "NA", flagged ? "1" : "0"});
    }
    return out;
}

std::string format_gene_table(const PosteriorSummary& summary) {
    std::string out = tsv_row({"set_name", "gene_id", "mean_beta", "tail_prob"});
    for (const auto& g : summary.genes) {
        out += tsv_row({summary.sets.at(g.set).name, g.gene_id, format_sig(g.mean_beta), format_sig(g.tail_prob)});
    }
    return out;
}

std::string format_baseline_table(const BaselineResult& r) {
    const bool restd = !r.restd_stat.empty();
    std::string out = tsv_row({"set_name", "n_genes", "raw_stat", "restd_stat", "perm_pvalue"});
    for (std::size_t s = 0; s < r.set_names.size(); ++s) {
        out += tsv_row({r.set_names[s], std::to_string(r.set_sizes[s]), format_sig(r.raw_stat[s]),
                        restd ? format_sig(r.restd_stat[s]) : "NA", format_sig(r.perm_pvalue[s])});
    }
    return out;
}

std::string format_benchmark_table(const BenchmarkReport& report) {
    std::string out = tsv_row({"scenario", "method", "n_replicates", "mean_auc", "std_error"});
    for (const auto& c : report.cells) {
        out += tsv_row({to_string(c.scenario), to_string(c.method), std::to_string(c.auc_percent.size()),
                        format_sig(c.mean_auc), format_sig(c.std_error)});
    }
    return out;
}

std::string format_roc_table(const BenchmarkReport& report) {
    std::string out = tsv_row({"scenario", "method", "replicate", "fpr", "tpr"});
    for (const auto& c : report.cells) {
        for (std::size_t r = 0; r < c.roc.size(); ++r) {
            for (const auto& p : c.roc[r]) {
                out += tsv_row({to_string(c.scenario), to_string(c.method), std::to_string(r), format_sig(p.fpr, 6),
                                format_sig(p.tpr, 6)});
            }
        }
    }
    return out;
}

json to_json(const McmcConfig& cfg) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json proper = nullptr;
    if (cfg.proper_prior) {
        proper = {{"alpha_var", cfg.proper_prior->alpha_var},
                  {"sigma_dof", cfg.proper_prior->sigma_dof},
                  {"sigma_scale_sq", cfg.proper_prior->sigma_scale_sq}};
    }
    return {{"n_iterations", cfg.n_iterations},
            {"burn_in", cfg.burn_in},
            {"seed", cfg.seed},
            {"model_variant", to_string(cfg.model_variant)},
            {"beta_prior_a", cfg.beta_prior_a},
            {"beta_prior_b", cfg.beta_prior_b},
            {"slice", {{"initial_width", cfg.slice.initial_width}, {"max_step_out", cfg.slice.max_step_out}}},
            {"fixed_nu", opt(cfg.fixed_nu)},
            {"fixed_phi0_sq", opt(cfg.fixed_phi0_sq)},
            {"fixed_phi1_sq", opt(cfg.fixed_phi1_sq)},
            {"proper_prior", std::move(proper)},
            {"rao_blackwell", cfg.rao_blackwell},
            {"keep_beta_draws", cfg.keep_beta_draws}};
}

McmcConfig mcmc_config_from_json(const json& j) {
    try {
        auto opt = [&](const char* key) -> std::optional<double> {
            if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
            return j.at(key).get<double>();
        };
        McmcConfig cfg;
        cfg.n_iterations = j.at("n_iterations").get<std::size_t>();
        cfg.burn_in = j.at("burn_in").get<std::size_t>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.model_variant = parse_variant(j.at("model_variant").get<std::string>());
        cfg.beta_prior_a = j.at("beta_prior_a").get<double>();
        cfg.beta_prior_b = j.at("beta_prior_b").get<double>();
        cfg.slice.initial_width = j.at("slice").at("initial_width").get<double>();
        cfg.slice.max_step_out = j.at("slice").at("max_step_out").get<int>();
        cfg.fixed_nu = opt("fixed_nu");
        cfg.fixed_phi0_sq = opt("fixed_phi0_sq");
        cfg.fixed_phi1_sq = opt("fixed_phi1_sq");
        if (j.contains("proper_prior") && !j.at("proper_prior").is_null()) {
            const auto& p = j.at("proper_prior");
            cfg.proper_prior = ProperBaselinePrior{p.at("alpha_var").get<double>(), p.at("sigma_dof").get<double>(),
                                                   p.at("sigma_scale_sq").get<double>()};
        }
        cfg.rao_blackwell = j.value("rao_blackwell", false);
        cfg.keep_beta_draws = j.value("keep_beta_draws", false);
        return cfg;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed MCMC config: ") + e.what());
    }
}

json to_json(const SamplerDiagnostics& diag) { return {{"residual_floor_hits", diag.residual_floor_hits}}; }

json version_info() {
    return {{"bgsa", kVersion},
            {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                          std::to_string(BOOST_VERSION % 100)}};
}

json benchmark_to_json(const BenchmarkReport& report) {
    const auto& cfg = report.config;
    json scenarios = json::array();
    for (auto s : cfg.scenarios) scenarios.push_back(to_string(s));
    json methods = json::array();
    for (auto m : cfg.methods) methods.push_back(to_string(m));
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"scenario", to_string(c.scenario)},
                         {"method", to_string(c.method)},
                         {"mean_auc", c.mean_auc},
                         {"std_error", c.std_error},
                         {"auc_percent", c.auc_percent}});
    }
    json comparisons = json::array();
    for (const auto& c : report.comparisons) {
        comparisons.push_back({{"scenario", to_string(c.scenario)},
                               {"first", to_string(c.first)},
                               {"second", to_string(c.second)},
                               {"mean_diff", c.test.mean_diff},
                               {"t", c.test.t},
                               {"dof", c.test.dof},
                               {"p_two_sided", c.test.p_two_sided}});
    }
    return {{"config",
             {{"scenarios", std::move(scenarios)},
              {"methods", std::move(methods)},
              {"n_replicates", cfg.n_replicates},
              {"mcmc", to_json(cfg.mcmc)},
              {"n_permutations", cfg.n_permutations},
              {"n_randomizations", cfg.n_randomizations},
              {"maxmean_restandardize", cfg.maxmean_restandardize},
              {"seed", cfg.seed}}},
            {"cells", std::move(cells)},
            {"comparisons", std::move(comparisons)}};
}

namespace {

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
}

}  // namespace

ResultFiles write_results(const PosteriorSummary& summary, const fs::path& dir, double cutoff, bool flagged_only) {
    ensure_dir(dir);
    ResultFiles f{dir / "sets.tsv", dir / "genes.tsv"};
    write_text_atomic(f.sets, format_set_table(summary, cutoff, flagged_only));
    write_text_atomic(f.genes, format_gene_table(summary));
    return f;
}

fs::path write_results(const BaselineResult& result, const fs::path& dir) {
    ensure_dir(dir);
    const fs::path p = dir / "baseline.tsv";
    write_text_atomic(p, format_baseline_table(result));
    return p;
}

std::vector<fs::path> write_results(const BenchmarkReport& report, const fs::path& dir) {
    ensure_dir(dir);
    std::vector<fs::path> out{dir / "benchmark.tsv", dir / "benchmark.json", dir / "roc.tsv"};
    write_text_atomic(out[0], format_benchmark_table(report));
    write_json(benchmark_to_json(report), out[1]);
    write_text_atomic(out[2], format_roc_table(report));
    return out;
}

void write_json(const json& j, const fs::path& path) { write_text_atomic(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    const std::string text = read_text(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

}  // namespace bgsa::io
