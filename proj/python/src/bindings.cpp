#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "bgsa/baselines.hpp"
#include "bgsa/errors.hpp"
#include "bgsa/evaluation.hpp"
#include "bgsa/io.hpp"
#include "bgsa/sampler.hpp"
#include "bgsa/simgen.hpp"
#include "bgsa/version.hpp"

namespace py = pybind11;
using namespace bgsa;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ExpressionDataset make_dataset(const DoubleArray& values, const std::vector<int>& labels,
                               std::vector<std::string> gene_ids, std::vector<std::string> sample_ids) {
    if (values.ndim() != 2) throw InputError("values must be a 2-D array (genes x samples)");
    const auto rows = static_cast<std::size_t>(values.shape(0));
    const auto cols = static_cast<std::size_t>(values.shape(1));
    ExpressionDataset d;
    d.values = Matrix(rows, cols);
    std::copy(values.data(), values.data() + rows * cols, d.values.data().begin());
    for (int l : labels) {
        if (l != 0 && l != 1) throw InputError("labels must be 0 (control) or 1 (treatment)");
        d.class_labels.push_back(static_cast<std::uint8_t>(l));
    }
    if (gene_ids.empty()) {
        for (std::size_t g = 0; g < rows; ++g) gene_ids.push_back("g" + std::to_string(g));
    }
    if (sample_ids.empty()) {
        for (std::size_t i = 0; i < cols; ++i) sample_ids.push_back("s" + std::to_string(i));
    }
    d.gene_ids = std::move(gene_ids);
    d.sample_ids = std::move(sample_ids);
    d.validate();
    return d;
}

GeneSetCollection make_sets(const std::vector<std::vector<std::size_t>>& sets, std::vector<std::string> names) {
    GeneSetCollection c;
    c.sets = sets;
    if (names.empty()) {
        for (std::size_t s = 0; s < sets.size(); ++s) names.push_back("set" + std::to_string(s + 1));
    }
    c.names = std::move(names);
    return c;
}

py::dict dataset_dict(const ExpressionDataset& d) {
    DoubleArray values({d.n_genes(), d.n_samples()});
    std::copy(d.values.data().begin(), d.values.data().end(), values.mutable_data());
    py::dict out;
    out["values"] = values;
    out["labels"] = std::vector<int>(d.class_labels.begin(), d.class_labels.end());
    out["gene_ids"] = d.gene_ids;
    out["sample_ids"] = d.sample_ids;
    return out;
}

py::dict summary_dict(const PosteriorSummary& s) {
    py::list sets, genes;
    for (const auto& set : s.sets) {
        py::dict row;
        row["set_name"] = set.name;
        row["n_genes"] = set.size;
        row["mean_tau_sq"] = set.mean_tau_sq;
        row["prob_null"] = set.prob_null ? py::object(py::float_(*set.prob_null)) : py::object(py::none());
        sets.append(row);
    }
    for (const auto& g : s.genes) {
        py::dict row;
        row["set_name"] = s.sets.at(g.set).name;
        row["gene_id"] = g.gene_id;
        row["mean_beta"] = g.mean_beta;
        row["tail_prob"] = g.tail_prob;
        genes.append(row);
    }
    py::dict out;
    out["sets"] = sets;
    out["genes"] = genes;
    out["retained"] = s.retained;
    out["seed"] = s.seed;
    out["variant"] = to_string(s.variant);
    out["residual_floor_hits"] = s.diagnostics.residual_floor_hits;
    return out;
}

py::dict fit(const DoubleArray& values, const std::vector<int>& labels, const std::vector<std::vector<std::size_t>>& sets,
             std::vector<std::string> set_names, std::vector<std::string> gene_ids, const std::string& variant,
             std::size_t iters, std::size_t burnin, std::uint64_t seed, bool rao_blackwell) {
    const ExpressionDataset d = make_dataset(values, labels, std::move(gene_ids), {});
    const GeneSetCollection c = make_sets(sets, std::move(set_names));
    McmcConfig cfg;
    cfg.n_iterations = iters;
    cfg.burn_in = burnin;
    cfg.seed = seed;
    cfg.model_variant = parse_variant(variant);
    cfg.rao_blackwell = rao_blackwell;
    cfg.validate();
    PosteriorSummary s;
    {
        py::gil_scoped_release release;
        const BoundProblem p = validate_and_bind(d, c);
        s = summarize(run_chain(p, cfg), p, rao_blackwell);
    }
    return summary_dict(s);
}

py::dict baseline(const DoubleArray& values, const std::vector<int>& labels,
                  const std::vector<std::vector<std::size_t>>& sets, std::vector<std::string> set_names,
                  const std::string& method, std::size_t perms, bool restandardize, std::size_t randomizations,
                  bool exhaustive, std::uint64_t seed, unsigned threads) {
    const ExpressionDataset d = make_dataset(values, labels, {}, {});
    const GeneSetCollection c = make_sets(sets, std::move(set_names));
    BaselineOptions o;
    o.method = parse_statistic(method);
    o.n_permutations = perms;
    o.restandardize = restandardize;
    o.n_randomizations = randomizations;
    o.exhaustive = exhaustive;
    o.seed = seed;
    o.threads = threads;
    BaselineResult r;
    {
        py::gil_scoped_release release;
        r = permutation_pvalues(d, c, o);
    }
    py::dict out;
    out["method"] = to_string(r.method);
    out["set_names"] = r.set_names;
    out["set_sizes"] = r.set_sizes;
    out["raw_stat"] = r.raw_stat;
    out["restd_stat"] = r.restd_stat;
    out["perm_pvalue"] = r.perm_pvalue;
    out["n_permutations"] = r.n_permutations;
    return out;
}

py::dict simulate(const std::string& scenario, std::uint64_t seed) {
    const SimulatedData sim = generate(parse_scenario(scenario), seed);
    py::dict out = dataset_dict(sim.data);
    out["sets"] = sim.sets.sets;
    out["set_names"] = sim.sets.names;
    out["truth"] = from_json(io::truth_to_json(sim.truth));
    return out;
}

py::dict load(const std::string& matrix, const std::string& labels, const std::string& gmt) {
    const ExpressionDataset d = io::read_matrix(matrix, labels);
    io::GmtLoadReport rep;
    const GeneSetCollection c = io::parse_gmt(gmt, d, &rep);
    py::dict out = dataset_dict(d);
    out["sets"] = c.sets;
    out["set_names"] = c.names;
    out["dropped_genes"] = rep.dropped_genes;
    out["dropped_sets"] = rep.dropped_sets;
    return out;
}

std::vector<double> as_vector(const DoubleArray& a) { return {a.data(), a.data() + a.size()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian gene set analysis: Gibbs sampler, baselines and simulators";
    m.attr("__version__") = kVersion;

    // translators run last-registered first, so the base class goes first
    py::register_exception<Error>(m, "BgsaError", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("fit", &fit, py::arg("values"), py::arg("labels"), py::arg("sets"), py::arg("set_names") = std::vector<std::string>{},
          py::arg("gene_ids") = std::vector<std::string>{}, py::arg("variant") = "mixture", py::arg("iters") = 2000,
          py::arg("burnin") = 500, py::arg("seed") = 0, py::arg("rao_blackwell") = false,
          "Run the Gibbs sampler and return set- and gene-level posterior summaries.");
    m.def("baseline", &baseline, py::arg("values"), py::arg("labels"), py::arg("sets"),
          py::arg("set_names") = std::vector<std::string>{}, py::arg("method") = "maxmean", py::arg("perms") = 1000,
          py::arg("restandardize") = false, py::arg("randomizations") = 100, py::arg("exhaustive") = false,
          py::arg("seed") = 0, py::arg("threads") = 1, "Label-permutation p-values for a set statistic.");
    m.def("simulate", &simulate, py::arg("scenario"), py::arg("seed") = 0,
          "Generate a synthetic dataset with gene sets and ground truth.");
    m.def("load", &load, py::arg("matrix"), py::arg("labels"), py::arg("gmt"),
          "Read a matrix TSV, labels TSV and GMT file.");
    m.def(
        "gene_zscores",
        [](const DoubleArray& values, const std::vector<int>& labels) {
            return gene_zscores(make_dataset(values, labels, {}, {})).z;
        },
        py::arg("values"), py::arg("labels"));
    m.def("maxmean", [](const DoubleArray& z) { return maxmean(as_vector(z)); }, py::arg("z"));
    m.def("mean_z", [](const DoubleArray& z) { return mean_z(as_vector(z)); }, py::arg("z"));
    m.def("mean_abs_z", [](const DoubleArray& z) { return mean_abs_z(as_vector(z)); }, py::arg("z"));
    m.def(
        "ks_signed", [](const DoubleArray& a, const DoubleArray& b) { return ks_signed(as_vector(a), as_vector(b)); },
        py::arg("z_set"), py::arg("z_complement"));
    m.def(
        "auc",
        [](const std::vector<double>& scores, const std::vector<std::size_t>& positives) {
            MethodScores s;
            s.score = scores;
            return auc(s, positives);
        },
        py::arg("scores"), py::arg("positive_sets"), "Mann-Whitney AUC; ties count one half.");
    m.def(
        "prior_correlation_demo",
        [](std::size_t reps, std::size_t draws, std::uint64_t seed) {
            const PriorCorrelationDemo d = gen_prior_correlation_demo(reps, draws, seed);
            return py::make_tuple(d.r_within, d.r_between);
        },
        py::arg("reps") = 1000, py::arg("draws") = 100, py::arg("seed") = 0);
}
