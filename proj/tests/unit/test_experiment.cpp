#include "specgconv/analysis.hpp"
#include "specgconv/csv.hpp"
#include "specgconv/experiment.hpp"
#include "specgconv/log.hpp"

#include "../support/checks.hpp"
#include "../support/oracles.hpp"

#include <doctest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

using namespace specgconv;
using json = nlohmann::json;

namespace {

json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Two loosely joined 8-node communities with train, val and test nodes.
std::filesystem::path community_fixture(const std::string& name) {
    const auto dir = oracle::scratch_dir(name);
    oracle::Rng rng(5);
    std::string edges = "source,target\n", features = "c0,c1\n", labels = "node,label\n", split = "node,role\n";
    for (int i = 0; i < 16; ++i) {
        for (int j = i + 1; j < 16; ++j) {
            if ((i < 8) == (j < 8) && rng.uniform() < 0.6) edges += std::to_string(i) + "," + std::to_string(j) + "\n";
        }
        const int label = i < 8 ? 0 : 1;
        features += csv::format_double((label == 0 ? 1.0 : -1.0) + rng.normal()) + "," +
                    csv::format_double(rng.normal()) + "\n";
        labels += std::to_string(i) + "," + std::to_string(label) + "\n";
        const char* role = i % 4 == 0 ? "val" : (i % 4 == 1 ? "test" : "train");
        split += std::to_string(i) + "," + role + "\n";
    }
    edges += "7,8\n";
    oracle::write_text(dir / "edges.csv", edges);
    oracle::write_text(dir / "features.csv", features);
    oracle::write_text(dir / "labels.csv", labels);
    oracle::write_text(dir / "split.csv", split);
    return dir;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("graph specs") {
    CHECK(resolve_graph("ring1001").num_nodes() == 1001);
    CHECK(resolve_graph("star4").num_nodes() == 5);
    CHECK(resolve_graph("random:30:0.2:4").adjacency() == make_random_graph(30, 0.2, 4).adjacency());
    CHECK(checks::error_kind([] { resolve_graph("random:30:0.2"); }) == ErrorKind::Config);
    CHECK(checks::error_kind([] { resolve_graph("/no/such/graph"); }).has_value());
}

TEST_CASE("kernel request parsing") {
    CHECK(parse_kernel_request("gcn").kind == KernelRequest::Kind::Gcn);
    const KernelRequest cheb = parse_kernel_request("cheb:3");
    CHECK(cheb.kind == KernelRequest::Kind::Chebyshev);
    CHECK(cheb.count == 3);
    const KernelRequest cayley = parse_kernel_request("cayley:0.5:2");
    CHECK(cayley.scale == 0.5);
    CHECK(cayley.count == 2);
    const KernelRequest designs = parse_kernel_request("design:lowpass(eta=5);highpass");
    CHECK(designs.designs.size() == 2);
    const KernelRequest gat = parse_kernel_request("gat:7:250");
    CHECK(gat.kind == KernelRequest::Kind::GatStats);
    CHECK(gat.seed == 7);
    CHECK(gat.count == 250);
    for (const char* bad : {"", "cheb", "cheb:0", "cayley:1", "gat:x", "design:", "fourier"}) {
        CAPTURE(bad);
        CHECK(checks::error_kind([&] { parse_kernel_request(bad); }) == ErrorKind::Config);
    }
}

TEST_CASE("analyze on the 1001-ring reports the GCN cutoff") {
    const auto dir = oracle::scratch_dir("analyze_ring");
    AnalyzeOptions o;
    o.graph = "ring1001";
    o.kernel = "gcn";
    o.output_dir = dir;
    const AnalyzeSummary s = run_analyze(o);
    CHECK(std::abs(s.gcn_cutoff - 1.5) < 1e-6);
    CHECK(s.num_nodes == 1001);
    const json summary = read_json(dir / "summary.json");
    CHECK(std::abs(summary["gcn_cutoff"].get<double>() - 1.5) < 1e-6);
    CHECK(summary["d_bar"].get<double>() == 2.0);
    const json prov = read_json(dir / "provenance.json");
    CHECK(prov["version"] == version_string());
    CHECK(prov["lambda_max"].get<double>() == s.lambda_max);
    // Profile of the regular ring equals 1 - 2 lambda / 3.
    const FrequencyProfile p = import_profile(dir / "profile_1.csv");
    CHECK(p.lambda.size() == 1001);
    CHECK((p.standard - (1.0 - p.lambda.array() * 2.0 / 3.0).matrix()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("analyze with the all-pass design gives a constant profile") {
    const auto dir = oracle::scratch_dir("analyze_allpass");
    AnalyzeOptions o;
    o.graph = "random:25:0.3:2";
    o.kernel = "design:allpass";
    o.output_dir = dir;
    const AnalyzeSummary s = run_analyze(o);
    REQUIRE(s.coverage.has_value());
    CHECK(*s.coverage == 1.0);
    const FrequencyProfile p = import_profile(dir / "profile_1.csv");
    CHECK((p.standard.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("analyze cheb:3 matches the Chebyshev oracle") {
    const auto dir = oracle::scratch_dir("analyze_cheb");
    AnalyzeOptions o;
    o.graph = "ring64";
    o.kernel = "cheb:3";
    o.output_dir = dir;
    const AnalyzeSummary s = run_analyze(o);
    for (int k = 0; k < 3; ++k) {
        const FrequencyProfile p = import_profile(dir / ("profile_" + std::to_string(k + 1) + ".csv"));
        for (Index i = 0; i < p.lambda.size(); ++i) {
            const double x = 2.0 * p.lambda(i) / s.lambda_max - 1.0;
            CHECK(std::abs(p.standard(i) - oracle::chebyshev_t(k, x)) < 1e-9);
        }
    }
}

TEST_CASE("analyze warns about poor design coverage") {
    const auto dir = oracle::scratch_dir("analyze_cover");
    AnalyzeOptions o;
    o.graph = "ring16";
    o.kernel = "design:lowpass(eta=1)";
    o.output_dir = dir;
    const WarningHandler previous = set_warning_handler([](const std::string&) {});
    const AnalyzeSummary s = run_analyze(o);
    set_warning_handler(previous);
    CHECK(s.warnings.size() == 1);
    CHECK(read_json(dir / "summary.json")["warnings"].size() == 1);
}

TEST_CASE("analyze GAT statistics") {
    const auto dir = oracle::scratch_dir("analyze_gat");
    AnalyzeOptions o;
    o.graph = "random:20:0.3:1";
    o.kernel = "gat:3:5";
    o.output_dir = dir;
    run_analyze(o);
    const Matrix table = csv::read_matrix(dir / "gat_profile.csv");
    CHECK(table.rows() == 20);
    CHECK(table.cols() == 3);
    CHECK(read_json(dir / "summary.json")["gat_trials"] == 5);
}

TEST_CASE("train on a synthetic band-pass task writes metrics and provenance") {
    const auto dir = oracle::scratch_dir("train_bandpass");
    const json config{{"dataset", {{"kind", "synthetic_bandpass"}, {"nodes", 40}, {"edge_probability", 0.3}}},
                      {"designs", {"bandpass(c=0.5,gamma=4)", "lowpass(eta=1)"}},
                      {"architecture", "DSG2"},
                      {"train", {{"epochs", 20}, {"learning_rate", 0.05}, {"seed", 3}}}};
    TrainOptions o;
    o.config_json = config.dump();
    o.output_dir = dir;
    const json result = json::parse(run_train(o));
    CHECK(result["mode"] == "holdout");
    CHECK(result["runs"].size() == 1);
    CHECK(result["param_count"] == 2 * 1 + 1 * 2);
    CHECK(result["coverage"].get<double>() > 0.0);
    CHECK(std::filesystem::exists(dir / "metrics.csv"));
    CHECK(std::filesystem::exists(dir / "checkpoint.json"));
    const json prov = read_json(dir / "provenance.json");
    CHECK(prov["config"]["train"]["seed"] == 3);
    CHECK(prov.contains("lambda_max"));
    CHECK(prov.contains("d_bar"));
    CHECK(prov["seeds"] == json::array({3}));
    const csv::Table metrics = csv::read_table(dir / "metrics.csv");
    CHECK(metrics.rows.size() == 20);
    CHECK(metrics.column("train_loss") >= 0);
}

TEST_CASE("learning rate zero keeps the checkpoint at initialization across seeds") {
    const auto dir = oracle::scratch_dir("train_lr0");
    const json config{{"dataset", {{"kind", "synthetic_bandpass"}, {"nodes", 30}}},
                      {"designs", {"allpass"}},
                      {"architecture", "G2"},
                      {"train", {{"epochs", 3}, {"learning_rate", 0.0}}}};
    TrainOptions o;
    o.config_json = config.dump();
    o.output_dir = dir / "a";
    run_train(o);
    o.overrides_json = R"({"train": {"epochs": 9}})";
    o.output_dir = dir / "b";
    run_train(o);
    CHECK(slurp(dir / "a" / "checkpoint.json") == slurp(dir / "b" / "checkpoint.json"));
}

TEST_CASE("strict-repro re-run is bit-identical") {
    const auto dir = oracle::scratch_dir("train_repro");
    const json config{{"dataset", {{"kind", "synthetic_bandpass"}, {"nodes", 30}}},
                      {"designs", {"lowpass(eta=2)", "highpass"}},
                      {"architecture", "DSG4-DSG2"},
                      {"train", {{"epochs", 10}, {"input_dropout", 0.3}, {"kernel_dropout", 0.3}}}};
    TrainOptions o;
    o.config_json = config.dump();
    o.strict_repro = true;
    o.output_dir = dir / "first";
    const std::string first = run_train(o);
    // Re-run from the recorded provenance alone.
    const json prov = read_json(dir / "first" / "provenance.json");
    CHECK(prov["strict_repro"] == true);
    TrainOptions again;
    again.config_json = prov["config"].dump();
    again.strict_repro = true;
    again.output_dir = dir / "second";
    CHECK(run_train(again) == first);
    CHECK(slurp(dir / "first" / "metrics.csv") == slurp(dir / "second" / "metrics.csv"));
    CHECK(slurp(dir / "first" / "checkpoint.json") == slurp(dir / "second" / "checkpoint.json"));
}

TEST_CASE("eta sweep selects the minimum validation loss") {
    const auto data = community_fixture("eta_data");
    const auto dir = oracle::scratch_dir("eta_out");
    const json config{{"dataset", {{"kind", "single"}, {"path", data.string()}}},
                      {"architecture", "G2"},
                      {"mode", "eta_sweep"},
                      {"eta_values", {1, 3, 5}},
                      {"train", {{"epochs", 30}, {"learning_rate", 0.05}}}};
    TrainOptions o;
    o.config_json = config.dump();
    o.output_dir = dir;
    const json result = json::parse(run_train(o));
    REQUIRE(result["sweep"].size() == 3);
    double best = 1e300, best_eta = 0.0;
    for (const json& row : result["sweep"]) {
        if (row["min_val_loss"].get<double>() < best) {
            best = row["min_val_loss"].get<double>();
            best_eta = row["eta"].get<double>();
        }
    }
    CHECK(result["selected_eta"].get<double>() == best_eta);
}

TEST_CASE("crossval on the synthetic degree dataset") {
    const auto dir = oracle::scratch_dir("crossval");
    const json config{{"dataset", {{"kind", "synthetic_degree"}, {"graphs", 40}}},
                      {"kernel", "cheb:2"},
                      {"architecture", "G4-meanmax-D2"},
                      {"mode", "crossval"},
                      {"folds", 4},
                      {"train", {{"epochs", 5}, {"batch_size", 4}}}};
    TrainOptions o;
    o.config_json = config.dump();
    o.output_dir = dir;
    const json result = json::parse(run_train(o));
    CHECK(result["crossval"]["std_defined"] == false);
    CHECK(result["crossval"]["per_repeat"].size() == 1);
    CHECK(result["num_graphs"] == 40);
}

TEST_CASE("config errors") {
    TrainOptions o;
    o.output_dir = oracle::scratch_dir("config_errors");
    const json base{{"dataset", {{"kind", "synthetic_bandpass"}, {"nodes", 20}}},
                    {"designs", {"allpass"}},
                    {"architecture", "G2"}};
    auto kind_of = [&](const json& patch) {
        json j = base;
        j.merge_patch(patch);
        o.config_json = j.dump();
        return checks::error_kind([&] { run_train(o); });
    };
    CHECK(kind_of(json{{"unknown_key", 1}}) == ErrorKind::Config);
    CHECK(kind_of(json{{"train", {{"momentum", 0.9}}}}) == ErrorKind::Config);
    CHECK(kind_of(json{{"architecture", "G3"}}) == ErrorKind::Config);
    CHECK(kind_of(json{{"mode", "crossval"}}) == ErrorKind::Config);
    CHECK(kind_of(json{{"dataset", {{"kind", "imagenet"}}}}) == ErrorKind::Config);
    CHECK(kind_of(json{{"train", {{"input_dropout", 1.5}}}}) == ErrorKind::Config);
    o.config_json = "{not json";
    CHECK(checks::error_kind([&] { run_train(o); }) == ErrorKind::Config);
}

}
