#include "specgconv/experiment.hpp"

#include "specgconv/analysis.hpp"
#include "specgconv/csv.hpp"
#include "specgconv/datasets.hpp"
#include "specgconv/error.hpp"
#include "specgconv/log.hpp"
#include "specgconv/synthetic.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

namespace specgconv {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

long long parse_count(std::string_view text, const std::string& context) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw config_error("expected an integer in '" + context + "', got '" + std::string(text) + "'");
    }
    return v;
}

double parse_real(std::string_view text, const std::string& context) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw config_error("expected a number in '" + context + "', got '" + std::string(text) + "'");
    }
    return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

/// Replaces NaN with null so the output stays valid JSON.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json summarize(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return json{{"mean", mean}, {"std", values.size() > 1 ? std::sqrt(sq / n) : 0.0}, {"std_defined", values.size() > 1}};
}

Matrix one_hot_identity(Index n) { return Matrix::Identity(n, n); }

SpectralBasis basis_for(const Matrix& laplacian, LaplacianKind kind, const std::optional<fs::path>& cache_dir) {
    if (cache_dir) return BasisCache(*cache_dir).get_or_compute(laplacian, kind);
    return decompose(laplacian, kind);
}

// ---- configuration -------------------------------------------------------

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw config_error(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw config_error("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("field '") + key + "': " + e.what());
    }
}

struct DatasetConfig {
    std::string kind = "single";  // single | tu | synthetic_bandpass | synthetic_degree
    fs::path path;
    bool use_attributes = false;
    // synthetic_bandpass
    Index nodes = 128;
    double edge_probability = 0.3;
    double center = 0.5;
    double gamma = 4.0;
    double train_fraction = 0.5;
    // synthetic_degree
    int graphs = 200;
    Index min_nodes = 12;
    Index max_nodes = 20;
    double p_low = 0.2;
    double p_high = 0.5;
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    LaplacianKind laplacian = LaplacianKind::SymmetricNormalized;
    std::vector<std::string> designs;
    std::string kernel;
    std::string architecture;
    nn::ArchitectureOptions arch;
    nn::TrainConfig train;
    std::string mode = "holdout";  // holdout | crossval | eta_sweep
    int seeds = 1;
    int folds = 10;
    int repeats = 1;
    std::vector<double> eta_values{1, 3, 5, 10, 20};
    fs::path output_dir;
};

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
    check_keys(j, {"dataset", "laplacian", "designs", "kernel", "architecture", "hidden_activation",
                   "output_activation", "hidden_bias", "output_bias", "train", "mode", "seeds", "folds", "repeats",
                   "eta_values", "output_dir"},
               "config");
    ExperimentConfig c;
    if (!j.contains("dataset")) throw config_error("config needs a 'dataset' object");
    const json& d = j.at("dataset");
    check_keys(d, {"kind", "path", "use_attributes", "nodes", "edge_probability", "center", "gamma", "train_fraction",
                   "graphs", "min_nodes", "max_nodes", "p_low", "p_high", "seed"},
               "dataset");
    c.dataset.kind = get_or<std::string>(d, "kind", c.dataset.kind);
    if (d.contains("path")) {
        c.dataset.path = fs::path(d.at("path").get<std::string>());
        if (c.dataset.path.is_relative()) c.dataset.path = base_dir / c.dataset.path;
    }
    c.dataset.use_attributes = get_or(d, "use_attributes", c.dataset.use_attributes);
    c.dataset.nodes = get_or<Index>(d, "nodes", c.dataset.nodes);
    c.dataset.edge_probability = get_or(d, "edge_probability", c.dataset.edge_probability);
    c.dataset.center = get_or(d, "center", c.dataset.center);
    c.dataset.gamma = get_or(d, "gamma", c.dataset.gamma);
    c.dataset.train_fraction = get_or(d, "train_fraction", c.dataset.train_fraction);
    c.dataset.graphs = get_or(d, "graphs", c.dataset.graphs);
    c.dataset.min_nodes = get_or<Index>(d, "min_nodes", c.dataset.min_nodes);
    c.dataset.max_nodes = get_or<Index>(d, "max_nodes", c.dataset.max_nodes);
    c.dataset.p_low = get_or(d, "p_low", c.dataset.p_low);
    c.dataset.p_high = get_or(d, "p_high", c.dataset.p_high);
    c.dataset.seed = get_or<std::uint64_t>(d, "seed", c.dataset.seed);
    const std::set<std::string> kinds{"single", "tu", "synthetic_bandpass", "synthetic_degree"};
    if (!kinds.count(c.dataset.kind)) throw config_error("unknown dataset kind '" + c.dataset.kind + "'");
    if ((c.dataset.kind == "single" || c.dataset.kind == "tu") && c.dataset.path.empty()) {
        throw config_error("dataset kind '" + c.dataset.kind + "' needs a 'path'");
    }

    c.laplacian = parse_laplacian_kind(get_or<std::string>(j, "laplacian", "normalized"));
    c.designs = get_or(j, "designs", c.designs);
    c.kernel = get_or<std::string>(j, "kernel", "");
    c.architecture = get_or<std::string>(j, "architecture", "");
    if (c.architecture.empty()) throw config_error("config needs an 'architecture' string");
    c.arch.hidden_activation = nn::parse_activation(get_or<std::string>(j, "hidden_activation", "relu"));
    c.arch.output_activation = nn::parse_activation(get_or<std::string>(j, "output_activation", "linear"));
    c.arch.hidden_bias = get_or(j, "hidden_bias", c.arch.hidden_bias);
    c.arch.output_bias = get_or(j, "output_bias", c.arch.output_bias);

    if (j.contains("train")) {
        const json& t = j.at("train");
        check_keys(t, {"learning_rate", "epochs", "batch_size", "weight_decay", "depthwise_weight_decay",
                       "input_dropout", "kernel_dropout", "seed", "loss", "adam_beta1", "adam_beta2", "adam_epsilon"},
                   "train");
        nn::TrainConfig& tc = c.train;
        tc.learning_rate = get_or(t, "learning_rate", tc.learning_rate);
        tc.epochs = get_or(t, "epochs", tc.epochs);
        tc.batch_size = get_or(t, "batch_size", tc.batch_size);
        tc.weight_decay = get_or(t, "weight_decay", tc.weight_decay);
        tc.depthwise_weight_decay = get_or(t, "depthwise_weight_decay", tc.depthwise_weight_decay);
        tc.input_dropout = get_or(t, "input_dropout", tc.input_dropout);
        tc.kernel_dropout = get_or(t, "kernel_dropout", tc.kernel_dropout);
        tc.seed = get_or<std::uint64_t>(t, "seed", tc.seed);
        tc.loss = nn::parse_loss_kind(get_or<std::string>(t, "loss", nn::to_string(tc.loss)));
        tc.adam_beta1 = get_or(t, "adam_beta1", tc.adam_beta1);
        tc.adam_beta2 = get_or(t, "adam_beta2", tc.adam_beta2);
        tc.adam_epsilon = get_or(t, "adam_epsilon", tc.adam_epsilon);
    }
    c.train.validate();

    c.mode = get_or<std::string>(j, "mode", c.mode);
    if (c.mode != "holdout" && c.mode != "crossval" && c.mode != "eta_sweep") {
        throw config_error("unknown mode '" + c.mode + "' (expected holdout|crossval|eta_sweep)");
    }
    c.seeds = get_or(j, "seeds", c.seeds);
    c.folds = get_or(j, "folds", c.folds);
    c.repeats = get_or(j, "repeats", c.repeats);
    c.eta_values = get_or(j, "eta_values", c.eta_values);
    if (c.seeds < 1) throw config_error("seeds must be >= 1");
    if (c.mode != "eta_sweep" && c.designs.empty() && c.kernel.empty()) {
        throw config_error("config needs 'designs' or 'kernel'");
    }
    if (!c.designs.empty() && !c.kernel.empty()) throw config_error("give either 'designs' or 'kernel', not both");
    if (c.mode == "eta_sweep" && c.eta_values.empty()) throw config_error("eta_sweep needs 'eta_values'");
    if (j.contains("output_dir")) c.output_dir = fs::path(j.at("output_dir").get<std::string>());
    return c;
}

json to_json(const nn::TrainConfig& t) {
    return json{{"learning_rate", t.learning_rate},
                {"epochs", t.epochs},
                {"batch_size", t.batch_size},
                {"weight_decay", t.weight_decay},
                {"depthwise_weight_decay", t.depthwise_weight_decay},
                {"input_dropout", t.input_dropout},
                {"kernel_dropout", t.kernel_dropout},
                {"seed", t.seed},
                {"loss", nn::to_string(t.loss)},
                {"adam_beta1", t.adam_beta1},
                {"adam_beta2", t.adam_beta2},
                {"adam_epsilon", t.adam_epsilon}};
}

json resolved_config(const ExperimentConfig& c) {
    json d{{"kind", c.dataset.kind}};
    if (!c.dataset.path.empty()) d["path"] = c.dataset.path.string();
    if (c.dataset.kind == "tu") d["use_attributes"] = c.dataset.use_attributes;
    if (c.dataset.kind == "synthetic_bandpass") {
        d.update(json{{"nodes", c.dataset.nodes},
                      {"edge_probability", c.dataset.edge_probability},
                      {"center", c.dataset.center},
                      {"gamma", c.dataset.gamma},
                      {"train_fraction", c.dataset.train_fraction},
                      {"seed", c.dataset.seed}});
    }
    if (c.dataset.kind == "synthetic_degree") {
        d.update(json{{"graphs", c.dataset.graphs},
                      {"min_nodes", c.dataset.min_nodes},
                      {"max_nodes", c.dataset.max_nodes},
                      {"p_low", c.dataset.p_low},
                      {"p_high", c.dataset.p_high},
                      {"seed", c.dataset.seed}});
    }
    json j{{"dataset", d}, {"laplacian", c.laplacian == LaplacianKind::Combinatorial ? "combinatorial" : "normalized"}};
    if (!c.designs.empty()) j["designs"] = c.designs;
    if (!c.kernel.empty()) j["kernel"] = c.kernel;
    j["architecture"] = c.architecture;
    j["hidden_activation"] = nn::to_string(c.arch.hidden_activation);
    j["output_activation"] = nn::to_string(c.arch.output_activation);
    j["hidden_bias"] = c.arch.hidden_bias;
    j["output_bias"] = c.arch.output_bias;
    j["train"] = to_json(c.train);
    j["mode"] = c.mode;
    j["seeds"] = c.seeds;
    if (c.mode == "crossval") {
        j["folds"] = c.folds;
        j["repeats"] = c.repeats;
    }
    if (c.mode == "eta_sweep") j["eta_values"] = c.eta_values;
    j["output_dir"] = c.output_dir.string();
    return j;
}

KernelRequest training_kernels(const ExperimentConfig& c, const fs::path& base_dir) {
    if (!c.kernel.empty()) {
        KernelRequest r = parse_kernel_request(c.kernel, base_dir);
        if (r.kind == KernelRequest::Kind::GatSample || r.kind == KernelRequest::Kind::GatStats) {
            throw config_error("sampled GAT kernels cannot be used for training");
        }
        return r;
    }
    KernelRequest r;
    r.kind = KernelRequest::Kind::Designs;
    for (const std::string& text : c.designs) r.designs.push_back(parse_design(text, base_dir));
    r.text = "designs";
    return r;
}

int request_size(const KernelRequest& r) {
    switch (r.kind) {
    case KernelRequest::Kind::Gcn: return 1;
    case KernelRequest::Kind::Chebyshev: return r.count;
    case KernelRequest::Kind::Cayley: return 2 * r.count + 1;
    case KernelRequest::Kind::Designs: return static_cast<int>(r.designs.size());
    default: return 1;
    }
}

void write_metrics(const fs::path& path, const std::vector<nn::EpochMetrics>& history) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path.string());
    out << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    auto cell = [](double v) { return std::isfinite(v) ? csv::format_double(v) : std::string(); };
    for (const nn::EpochMetrics& m : history) {
        out << m.epoch << ',' << cell(m.train_loss) << ',' << cell(m.train_score) << ',' << cell(m.val_loss) << ','
            << cell(m.val_score) << '\n';
    }
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_checkpoint(const fs::path& path, const nn::ModelSpec& spec, const nn::Parameters& params) {
    json layers = json::array();
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const nn::LayerParams& p = params.layers[l];
        json layer{{"index", l}};
        json weights = json::array();
        for (const Matrix& w : p.weights) weights.push_back(matrix_json(w));
        layer["weights"] = std::move(weights);
        if (p.depthwise.size() > 0) layer["depthwise"] = matrix_json(p.depthwise);
        if (p.bias.size() > 0) layer["bias"] = matrix_json(p.bias.transpose());
        layers.push_back(std::move(layer));
    }
    write_json(path, json{{"architecture", nn::to_string(spec)},
                          {"input_width", spec.input_width},
                          {"num_supports", spec.num_supports},
                          {"layers", std::move(layers)}});
}

/// Single-graph data prepared for node classification.
struct NodeData {
    Graph graph;
    std::vector<int> labels;
    int num_classes = 0;
    std::vector<Index> train, val, test;
};

NodeData load_node_data(const ExperimentConfig& c) {
    NodeData d;
    if (c.dataset.kind == "single") {
        SingleGraphDataset ds = load_single_graph(c.dataset.path);
        d.graph = std::move(ds.graph);
        d.labels = std::move(ds.labels);
        d.num_classes = ds.num_classes;
        d.train = std::move(ds.train);
        d.val = std::move(ds.val);
        d.test = std::move(ds.test);
    } else {
        BandpassTask task = make_bandpass_task(c.dataset.nodes, c.dataset.edge_probability,
                                               design::BandPass{c.dataset.center, c.dataset.gamma},
                                               c.dataset.train_fraction, c.dataset.seed);
        d.graph = std::move(task.graph);
        d.labels = std::move(task.labels);
        d.num_classes = 2;
        d.train = std::move(task.train);
        d.test = std::move(task.test);
    }
    if (d.graph.num_features() == 0) throw config_error("node classification needs node features");
    return d;
}

nn::NodeTask make_node_task(const NodeData& d, std::vector<Matrix> supports) {
    nn::NodeTask task;
    task.features = d.graph.features();
    task.supports = std::move(supports);
    task.targets.classes.resize(d.labels.size());
    for (std::size_t i = 0; i < d.labels.size(); ++i) task.targets.classes[i] = std::max(d.labels[i], 0);
    task.train_rows = d.train;
    task.val_rows = d.val;
    task.test_rows = d.test;
    return task;
}

void check_output_width(const nn::ModelSpec& spec, int num_classes, nn::LossKind loss) {
    if (loss == nn::LossKind::SoftmaxCrossEntropy && spec.output_width() != num_classes) {
        throw config_error("architecture ends with width " + std::to_string(spec.output_width()) + " but the data has " +
                           std::to_string(num_classes) + " classes");
    }
}

const char* metric_name(nn::LossKind loss) {
    return loss == nn::LossKind::SoftmaxCrossEntropy ? "accuracy" : "micro_f1";
}

} // namespace

// ---- graph and kernel specs ------------------------------------------------

Graph resolve_graph(const std::string& spec) {
    if (spec.starts_with("random:")) {
        const auto parts = split(spec, ':');
        if (parts.size() != 4) throw config_error("random graph spec is random:<n>:<p>:<seed>, got '" + spec + "'");
        return make_random_graph(static_cast<Index>(parse_count(parts[1], spec)), parse_real(parts[2], spec),
                                 static_cast<std::uint64_t>(parse_count(parts[3], spec)));
    }
    if (spec.starts_with("ring") && !fs::exists(spec)) {
        return make_ring(static_cast<Index>(parse_count(std::string_view(spec).substr(4), spec)));
    }
    if (spec.starts_with("star") && !fs::exists(spec)) {
        return make_star(static_cast<Index>(parse_count(std::string_view(spec).substr(4), spec)));
    }
    if (fs::is_directory(spec)) return load_single_graph(spec).graph;
    throw config_error("graph '" + spec + "' is neither ring<N>, star<N>, random:<n>:<p>:<seed> nor a directory");
}

KernelRequest parse_kernel_request(const std::string& text, const fs::path& base_dir) {
    KernelRequest r;
    r.text = text;
    if (text == "gcn") {
        r.kind = KernelRequest::Kind::Gcn;
        return r;
    }
    if (text.starts_with("design:")) {
        r.kind = KernelRequest::Kind::Designs;
        for (const std::string& part : split(std::string_view(text).substr(7), ';')) {
            if (!part.empty()) r.designs.push_back(parse_design(part, base_dir));
        }
        if (r.designs.empty()) throw config_error("'design:' needs at least one design expression");
        return r;
    }
    const auto parts = split(text, ':');
    if (parts[0] == "cheb" && parts.size() == 2) {
        r.kind = KernelRequest::Kind::Chebyshev;
        r.count = static_cast<int>(parse_count(parts[1], text));
        if (r.count < 1) throw config_error("cheb:K needs K >= 1");
        return r;
    }
    if (parts[0] == "cayley" && parts.size() == 3) {
        r.kind = KernelRequest::Kind::Cayley;
        r.scale = parse_real(parts[1], text);
        r.count = static_cast<int>(parse_count(parts[2], text));
        if (!(r.scale > 0.0) || r.count < 1) throw config_error("cayley:H:R needs H > 0 and R >= 1");
        return r;
    }
    if (parts[0] == "gat" && (parts.size() == 2 || parts.size() == 3)) {
        r.seed = static_cast<std::uint64_t>(parse_count(parts[1], text));
        if (parts.size() == 3) {
            r.kind = KernelRequest::Kind::GatStats;
            r.count = static_cast<int>(parse_count(parts[2], text));
            if (r.count < 1) throw config_error("gat:SEED:TRIALS needs TRIALS >= 1");
        } else {
            r.kind = KernelRequest::Kind::GatSample;
        }
        return r;
    }
    throw config_error("unknown kernel '" + text +
                       "' (expected gcn | cheb:K | cayley:H:R | design:<expr> | gat:SEED[:TRIALS])");
}

KernelSet build_kernels(const Graph& g, std::shared_ptr<const SpectralBasis> basis, const Matrix& laplacian,
                        const KernelRequest& request) {
    KernelSet set;
    switch (request.kind) {
    case KernelRequest::Kind::Gcn:
        set.supports.push_back(gcn_kernel(g));
        set.provenance.emplace_back(provenance::Gcn{});
        set.basis = std::move(basis);
        break;
    case KernelRequest::Kind::Chebyshev:
        set = cheb_kernels(laplacian, basis->lambda_max(), request.count);
        set.basis = std::move(basis);
        break;
    case KernelRequest::Kind::Cayley: {
        std::vector<FilterDesign> designs;
        for (int s = 1; s <= 2 * request.count + 1; ++s) designs.emplace_back(design::CayleyBasis{s, request.scale, request.count});
        set = designed_kernels(std::move(basis), designs);
        break;
    }
    case KernelRequest::Kind::Designs:
        set = designed_kernels(std::move(basis), request.designs);
        break;
    case KernelRequest::Kind::GatSample: {
        const Graph with_features = g.num_features() > 0 ? g : g.with_features(one_hot_identity(g.num_nodes()));
        set.supports = gat_sample_kernels(with_features, 1, request.seed);
        set.provenance.emplace_back(provenance::GatSample{request.seed, 0});
        set.basis = std::move(basis);
        break;
    }
    case KernelRequest::Kind::GatStats:
        throw invalid_argument("GAT statistics are not a kernel set");
    }
    set.validate();
    return set;
}

// ---- analyze -----------------------------------------------------------------

AnalyzeSummary run_analyze(const AnalyzeOptions& options) {
    if (options.output_dir.empty()) throw config_error("analyze needs an output directory");
    fs::create_directories(options.output_dir);
    const KernelRequest request = parse_kernel_request(options.kernel);
    const Graph g = resolve_graph(options.graph);
    const Matrix laplacian = build_laplacian(g, options.laplacian);
    auto basis = std::make_shared<const SpectralBasis>(basis_for(laplacian, options.laplacian, options.cache_dir));

    AnalyzeSummary summary;
    summary.num_nodes = g.num_nodes();
    summary.lambda_max = basis->lambda_max();
    summary.average_degree = average_degree(g);
    summary.gcn_cutoff = gcn_cutoff(summary.average_degree);

    const WarningHandler previous = set_warning_handler([&summary](const std::string& m) {
        summary.warnings.push_back(m);
        std::fprintf(stderr, "warning: %s\n", m.c_str());
    });
    struct Restore {
        WarningHandler h;
        ~Restore() { set_warning_handler(std::move(h)); }
    } restore{previous};

    json kernels = json::array();
    json extra;
    ExportOptions export_options{options.absolute};
    if (request.kind == KernelRequest::Kind::GatStats) {
        const Graph with_features = g.num_features() > 0 ? g : g.with_features(one_hot_identity(g.num_nodes()));
        const GatProfileStats stats = gat_profile_stats(with_features, *basis, request.count, request.seed);
        const fs::path standard = options.output_dir / "gat_profile.csv";
        Matrix table(stats.lambda.size(), 3);
        table << stats.lambda, stats.mean_standard, stats.std_standard;
        if (options.absolute) table.rightCols(2) = table.rightCols(2).cwiseAbs().eval();
        csv::write_matrix(standard, table, {"lambda", "mean_standard", "std_standard"});
        csv::write_matrix(options.output_dir / "gat_full_mean.csv",
                          options.absolute ? Matrix(stats.mean_full.cwiseAbs()) : stats.mean_full);
        csv::write_matrix(options.output_dir / "gat_full_std.csv", stats.std_full);
        summary.files = {"gat_profile.csv", "gat_full_mean.csv", "gat_full_std.csv"};
        extra["gat_trials"] = stats.trials;
        extra["gat_seed"] = request.seed;
        extra["gat_mean_full_asymmetry"] = asymmetry(stats.mean_full);
    } else {
        const KernelSet set = build_kernels(g, basis, laplacian, request);
        for (std::size_t s = 0; s < set.size(); ++s) {
            const std::string tag = to_string(set.provenance[s]);
            const FrequencyProfile p = profile(set.supports[s], *basis, tag);
            const std::string stem = "profile_" + std::to_string(s + 1);
            export_profile(p, options.output_dir / (stem + ".csv"), options.output_dir / ("full_" + stem + ".csv"),
                           export_options);
            summary.files.push_back(stem + ".csv");
            summary.files.push_back("full_" + stem + ".csv");
            kernels.push_back(json{{"index", s + 1}, {"tag", tag}, {"standard", stem + ".csv"},
                                   {"full", "full_" + stem + ".csv"}});
        }
        if (request.kind == KernelRequest::Kind::Designs) {
            summary.coverage = coverage(request.designs, *basis);
            if (*summary.coverage < kCoverageWarningLevel) {
                warn("design set covers part of the spectrum with summed response " +
                     std::to_string(*summary.coverage) + " < " + std::to_string(kCoverageWarningLevel));
            }
        }
    }

    json j{{"graph", options.graph},
           {"kernel", options.kernel},
           {"laplacian", options.laplacian == LaplacianKind::Combinatorial ? "combinatorial" : "normalized"},
           {"num_nodes", summary.num_nodes},
           {"lambda_max", summary.lambda_max},
           {"d_bar", summary.average_degree},
           {"gcn_cutoff", summary.gcn_cutoff},
           {"absolute", options.absolute},
           {"kernels", kernels}};
    if (summary.coverage) j["coverage"] = *summary.coverage;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["warnings"] = summary.warnings;
    write_json(options.output_dir / "summary.json", j);
    write_json(options.output_dir / "provenance.json",
               json{{"command", "analyze"},
                    {"version", kVersion},
                    {"config", {{"graph", options.graph}, {"kernel", options.kernel}, {"laplacian", j["laplacian"]},
                                {"absolute", options.absolute}}},
                    {"seed", request.kind == KernelRequest::Kind::GatSample ||
                                     request.kind == KernelRequest::Kind::GatStats
                                 ? json(request.seed)
                                 : json(nullptr)},
                    {"lambda_max", summary.lambda_max},
                    {"d_bar", summary.average_degree}});
    summary.files.push_back("summary.json");
    summary.files.push_back("provenance.json");
    return summary;
}

// ---- train -------------------------------------------------------------------

std::string run_train(const TrainOptions& options) {
    json raw;
    try {
        raw = json::parse(options.config_json);
        if (!options.overrides_json.empty()) raw.merge_patch(json::parse(options.overrides_json));
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c = parse_config(raw, options.base_dir);
    if (!options.output_dir.empty()) c.output_dir = options.output_dir;
    if (c.output_dir.empty()) throw config_error("no output directory given");
    fs::create_directories(c.output_dir);

    const KernelRequest request = c.mode == "eta_sweep" ? KernelRequest{} : training_kernels(c, options.base_dir);
    json result{{"mode", c.mode}, {"metric", metric_name(c.train.loss)}};
    json prov{{"command", "train"},
              {"version", kVersion},
              {"strict_repro", options.strict_repro},
              {"config", resolved_config(c)}};
    std::vector<std::uint64_t> seeds;

    const bool node_level = c.dataset.kind == "single" || c.dataset.kind == "synthetic_bandpass";
    if (node_level) {
        if (c.mode == "crossval") throw config_error("crossval needs a multi-graph dataset");
        const NodeData data = load_node_data(c);
        const Matrix laplacian = build_laplacian(data.graph, c.laplacian);
        auto basis = std::make_shared<const SpectralBasis>(basis_for(laplacian, c.laplacian, options.cache_dir));
        prov["lambda_max"] = basis->lambda_max();
        prov["d_bar"] = average_degree(data.graph);

        if (c.mode == "holdout") {
            if (request.kind == KernelRequest::Kind::Designs) {
                const double cov = coverage(request.designs, *basis);
                result["coverage"] = cov;
                if (cov < kCoverageWarningLevel) warn("design set leaves part of the spectrum uncovered");
            }
            const KernelSet kernels = build_kernels(data.graph, basis, laplacian, request);
            const nn::ModelSpec spec = nn::parse_architecture(c.architecture, data.graph.num_features(),
                                                              static_cast<int>(kernels.size()), c.arch);
            check_output_width(spec, data.num_classes, c.train.loss);
            const nn::NodeTask task = make_node_task(data, kernels.supports);
            std::vector<double> test_scores;
            json runs = json::array();
            for (int r = 0; r < c.seeds; ++r) {
                nn::TrainConfig tc = c.train;
                tc.seed = c.train.seed + static_cast<std::uint64_t>(r);
                seeds.push_back(tc.seed);
                const nn::TrainResult run = nn::train_transductive(spec, task, tc);
                write_metrics(c.output_dir / ("metrics_seed" + std::to_string(tc.seed) + ".csv"), run.history);
                if (r == 0) {
                    write_metrics(c.output_dir / "metrics.csv", run.history);
                    write_checkpoint(c.output_dir / "checkpoint.json", spec, run.params);
                }
                const nn::EpochMetrics& last = run.history.empty() ? nn::EpochMetrics{} : run.history.back();
                runs.push_back(json{{"seed", tc.seed},
                                    {"final_train_loss", number_or_null(last.train_loss)},
                                    {"final_val_loss", number_or_null(last.val_loss)},
                                    {"final_val_score", number_or_null(last.val_score)},
                                    {"best_val_loss_epoch", run.best_val_loss_epoch},
                                    {"test_loss", number_or_null(run.test_loss)},
                                    {"test_score", number_or_null(run.test_score)}});
                if (std::isfinite(run.test_score)) test_scores.push_back(run.test_score);
            }
            result["architecture"] = nn::to_string(spec);
            result["num_supports"] = kernels.size();
            result["param_count"] = nn::param_count(spec);
            result["runs"] = std::move(runs);
            if (!test_scores.empty()) result["test"] = summarize(test_scores);
        } else {  // eta_sweep
            json table = json::array();
            double best_loss = std::numeric_limits<double>::infinity();
            double best_eta = 0.0;
            nn::TrainConfig tc = c.train;
            seeds.push_back(tc.seed);
            for (double eta : c.eta_values) {
                const std::vector<FilterDesign> designs{design::LowPass{eta}};
                const KernelSet kernels = designed_kernels(basis, designs);
                const nn::ModelSpec spec = nn::parse_architecture(c.architecture, data.graph.num_features(), 1, c.arch);
                check_output_width(spec, data.num_classes, c.train.loss);
                const nn::TrainResult run = nn::train_transductive(spec, make_node_task(data, kernels.supports), tc);
                double min_loss = std::numeric_limits<double>::infinity();
                double max_score = -std::numeric_limits<double>::infinity();
                for (const nn::EpochMetrics& m : run.history) {
                    if (std::isfinite(m.val_loss)) min_loss = std::min(min_loss, m.val_loss);
                    if (std::isfinite(m.val_score)) max_score = std::max(max_score, m.val_score);
                }
                if (!std::isfinite(min_loss)) throw config_error("eta_sweep needs validation nodes");
                table.push_back(json{{"eta", eta},
                                     {"min_val_loss", min_loss},
                                     {"max_val_score", max_score},
                                     {"test_score", number_or_null(run.test_score)}});
                if (min_loss < best_loss) {
                    best_loss = min_loss;
                    best_eta = eta;
                }
            }
            result["sweep"] = std::move(table);
            result["selected_eta"] = best_eta;
            result["selected_min_val_loss"] = best_loss;
        }
    } else {
        if (c.mode != "crossval") throw config_error("multi-graph datasets are evaluated with mode 'crossval'");
        const MultiGraphDataset ds =
            c.dataset.kind == "tu"
                ? load_tu_dataset(c.dataset.path, c.dataset.use_attributes)
                : make_degree_dataset(c.dataset.graphs, c.dataset.min_nodes, c.dataset.max_nodes, c.dataset.p_low,
                                      c.dataset.p_high, c.dataset.seed);
        std::vector<nn::GraphSample> samples;
        samples.reserve(ds.graphs.size());
        double lambda_max_min = std::numeric_limits<double>::infinity();
        double lambda_max_max = 0.0;
        double degree_sum = 0.0;
        for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
            const Graph& g = ds.graphs[i];
            Matrix laplacian;
            try {
                laplacian = build_laplacian(g, c.laplacian);
            } catch (const Error& e) {
                throw Error(e.kind(), "graph " + std::to_string(i) + ": " + e.what());
            }
            auto basis = std::make_shared<const SpectralBasis>(decompose(laplacian, c.laplacian));
            lambda_max_min = std::min(lambda_max_min, basis->lambda_max());
            lambda_max_max = std::max(lambda_max_max, basis->lambda_max());
            degree_sum += average_degree(g);
            nn::GraphSample sample;
            sample.features = g.features();
            sample.supports = build_kernels(g, basis, laplacian, request).supports;
            sample.target.classes = {ds.labels[i]};
            samples.push_back(std::move(sample));
        }
        prov["lambda_max"] = json{{"min", lambda_max_min}, {"max", lambda_max_max}};
        prov["d_bar"] = degree_sum / static_cast<double>(ds.graphs.size());
        const nn::ModelSpec spec = nn::parse_architecture(c.architecture, ds.feature_width, request_size(request), c.arch);
        check_output_width(spec, ds.num_classes, c.train.loss);
        for (int r = 0; r < c.repeats; ++r) seeds.push_back(c.train.seed + static_cast<std::uint64_t>(r));
        const nn::CrossValidationResult cv = nn::crossvalidate(spec, samples, ds.labels, c.train, c.folds, c.repeats);
        result["architecture"] = nn::to_string(spec);
        result["param_count"] = nn::param_count(spec);
        result["num_graphs"] = ds.graphs.size();
        result["num_classes"] = ds.num_classes;
        result["crossval"] = json{{"folds", c.folds},
                                  {"repeats", c.repeats},
                                  {"mean", cv.mean},
                                  {"std", cv.std},
                                  {"std_defined", cv.std_defined},
                                  {"per_repeat", cv.per_repeat},
                                  {"selected_epochs", cv.selected_epochs}};
    }

    prov["seeds"] = seeds;
    result["seeds"] = seeds;
    write_json(c.output_dir / "result.json", result);
    write_json(c.output_dir / "provenance.json", prov);
    return result.dump(2);
}

const char* version_string() { return kVersion; }

} // namespace specgconv
