// Command-line front end over the C interface.
#include "specgconv/specgconv.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3, kCheckFailed = 4 };

int exit_code(sgc_status status) {
    switch (status) {
    case SGC_OK: return kOk;
    case SGC_INVALID_ARGUMENT:
    case SGC_CONFIG_ERROR:
    case SGC_IO_ERROR: return kConfig;
    case SGC_NUMERICAL_ERROR: return kNumerical;
    case SGC_CHECK_FAILED: return kCheckFailed;
    case SGC_INTERNAL_ERROR: return kFailure;
    }
    return kFailure;
}

int report(sgc_status status) {
    if (status != SGC_OK) std::fprintf(stderr, "error: %s\n", sgc_last_error());
    return exit_code(status);
}

/// Owns a string returned by the library.
struct OwnedString {
    char* p = nullptr;
    ~OwnedString() { sgc_string_free(p); }
};

const char* cache_dir() {
    const char* dir = std::getenv("SPECGCONV_CACHE");
    return dir && *dir ? dir : nullptr;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis and training of graph convolution kernels"};
    app.set_version_flag("--version", sgc_version());
    app.require_subcommand(1);

    auto* analyze = app.add_subcommand("analyze", "Write frequency profiles of a kernel on a graph");
    std::string graph, kernel, laplacian = "normalized", analyze_out = "profile_out";
    bool absolute = false;
    analyze->add_option("--graph", graph, "ring<N>, star<N>, random:<n>:<p>:<seed>, or a dataset directory")->required();
    analyze->add_option("--kernel", kernel, "gcn | cheb:K | cayley:H:R | design:<expr>[;<expr>] | gat:SEED[:TRIALS]")
        ->required();
    analyze->add_option("--laplacian", laplacian, "combinatorial | normalized")
        ->check(CLI::IsMember({"combinatorial", "normalized"}));
    analyze->add_flag("--abs", absolute, "Write magnitudes of the profiles");
    analyze->add_option("--out", analyze_out, "Output directory");

    auto* train = app.add_subcommand("train", "Train a model from a JSON experiment config");
    std::string config_path, train_out;
    std::optional<std::uint64_t> seed;
    std::optional<int> epochs, seeds;
    std::optional<double> learning_rate;
    bool strict_repro = false;
    train->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    train->add_option("--out", train_out, "Output directory (overrides the config)");
    train->add_option("--seed", seed, "Base seed (overrides train.seed)");
    train->add_option("--epochs", epochs, "Epoch count (overrides train.epochs)");
    train->add_option("--lr", learning_rate, "Learning rate (overrides train.learning_rate)");
    train->add_option("--seeds", seeds, "Number of holdout seeds (overrides seeds)");
    train->add_flag("--strict-repro", strict_repro, "Serial, bit-reproducible execution");

    auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of all analytic gradients");
    std::uint64_t gradcheck_seed = 7;
    bool inject_fault = false, quiet = false;
    gradcheck->add_option("--seed", gradcheck_seed, "Seed of the random instances");
    gradcheck->add_flag("--inject-fault", inject_fault, "Flip the sign of depthwise gradients (must fail)");
    gradcheck->add_flag("--quiet", quiet, "Print only the verdict");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    if (analyze->parsed()) {
        OwnedString summary;
        const sgc_laplacian kind =
            laplacian == "combinatorial" ? SGC_LAPLACIAN_COMBINATORIAL : SGC_LAPLACIAN_NORMALIZED;
        const sgc_status status = sgc_analyze(graph.c_str(), kernel.c_str(), kind, analyze_out.c_str(),
                                              absolute ? 1 : 0, cache_dir(), &summary.p);
        if (status == SGC_OK) {
            const auto j = nlohmann::json::parse(summary.p);
            std::printf("nodes %lld  lambda_max %.10g  d_bar %.10g  gcn_cutoff %.10g\n",
                        static_cast<long long>(j["num_nodes"].get<std::int64_t>()), j["lambda_max"].get<double>(),
                        j["d_bar"].get<double>(), j["gcn_cutoff"].get<double>());
            std::printf("wrote %s/summary.json\n", analyze_out.c_str());
        }
        return report(status);
    }

    if (train->parsed()) {
        std::ifstream in(config_path);
        std::stringstream text;
        text << in.rdbuf();
        nlohmann::json overrides = nlohmann::json::object();
        if (seed) overrides["train"]["seed"] = *seed;
        if (epochs) overrides["train"]["epochs"] = *epochs;
        if (learning_rate) overrides["train"]["learning_rate"] = *learning_rate;
        if (seeds) overrides["seeds"] = *seeds;
        const std::string overrides_text = overrides.dump();
        const std::string base_dir = std::filesystem::path(config_path).parent_path().string();
        OwnedString result;
        const sgc_status status =
            sgc_train_run(text.str().c_str(), overrides_text.c_str(), train_out.empty() ? nullptr : train_out.c_str(),
                          base_dir.c_str(), strict_repro ? 1 : 0, cache_dir(), &result.p);
        if (status == SGC_OK) std::printf("%s\n", result.p);
        return report(status);
    }

    OwnedString result;
    const sgc_status status = sgc_gradcheck(gradcheck_seed, inject_fault ? 1 : 0, &result.p);
    if (result.p) {
        const auto j = nlohmann::json::parse(result.p);
        if (!quiet) {
            for (const auto& c : j["cases"]) {
                std::printf("%-44s params %4d  max rel err %.3e  %s\n", c["name"].get<std::string>().c_str(),
                            c["num_params"].get<int>(), c["max_rel_error"].get<double>(),
                            c["passed"].get<bool>() ? "ok" : "FAIL");
            }
        }
        std::printf("gradcheck %s (%zu cases, tolerance %.0e)\n", j["passed"].get<bool>() ? "PASSED" : "FAILED",
                    j["cases"].size(), j["tolerance"].get<double>());
    }
    return report(status);
}
