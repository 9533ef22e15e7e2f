#include "specgconv/specgconv.h"

#include "specgconv/analysis.hpp"
#include "specgconv/error.hpp"
#include "specgconv/experiment.hpp"
#include "specgconv/nn/gradcheck.hpp"

#include <json.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>

struct sgc_graph {
    specgconv::Graph graph;
};

struct sgc_basis {
    std::shared_ptr<const specgconv::SpectralBasis> basis;
    specgconv::Matrix laplacian;
};

struct sgc_kernels {
    specgconv::KernelSet set;
};

struct sgc_profile {
    specgconv::FrequencyProfile profile;
};

namespace {

thread_local std::string last_error;

sgc_status status_of(specgconv::ErrorKind kind) {
    switch (kind) {
    case specgconv::ErrorKind::InvalidArgument: return SGC_INVALID_ARGUMENT;
    case specgconv::ErrorKind::Config: return SGC_CONFIG_ERROR;
    case specgconv::ErrorKind::Numerical: return SGC_NUMERICAL_ERROR;
    case specgconv::ErrorKind::Io: return SGC_IO_ERROR;
    case specgconv::ErrorKind::CheckFailed: return SGC_CHECK_FAILED;
    }
    return SGC_INTERNAL_ERROR;
}

template <class F>
sgc_status guarded(F&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const specgconv::Error& e) {
        last_error = e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SGC_INTERNAL_ERROR;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SGC_INTERNAL_ERROR;
    } catch (...) {
        last_error = "unknown failure";
        return SGC_INTERNAL_ERROR;
    }
}

void require(const void* p, const char* what) {
    if (p == nullptr) throw specgconv::invalid_argument(std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

specgconv::LaplacianKind laplacian_of(sgc_laplacian kind) {
    switch (kind) {
    case SGC_LAPLACIAN_COMBINATORIAL: return specgconv::LaplacianKind::Combinatorial;
    case SGC_LAPLACIAN_NORMALIZED: return specgconv::LaplacianKind::SymmetricNormalized;
    }
    throw specgconv::invalid_argument("unknown Laplacian kind");
}

void copy_out(const double* src, std::int64_t count, double* out, std::int64_t len) {
    if (len < count) {
        throw specgconv::invalid_argument("output buffer holds " + std::to_string(len) + " values, " +
                                          std::to_string(count) + " needed");
    }
    std::memcpy(out, src, static_cast<std::size_t>(count) * sizeof(double));
}

std::optional<std::filesystem::path> optional_path(const char* p) {
    if (p == nullptr || *p == '\0') return std::nullopt;
    return std::filesystem::path(p);
}

} // namespace

extern "C" {

const char* sgc_version(void) { return specgconv::version_string(); }

const char* sgc_last_error(void) { return last_error.c_str(); }

void sgc_string_free(char* s) { std::free(s); }

sgc_status sgc_graph_resolve(const char* spec, sgc_graph** out) {
    return guarded([&] {
        require(spec, "spec");
        require(out, "out");
        *out = new sgc_graph{specgconv::resolve_graph(spec)};
        return SGC_OK;
    });
}

sgc_status sgc_graph_from_dense(int64_t n, const double* adjacency, int64_t f, const double* features,
                                sgc_graph** out) {
    return guarded([&] {
        require(adjacency, "adjacency");
        require(out, "out");
        if (n < 1 || f < 0) throw specgconv::invalid_argument("node and feature counts must be positive");
        if (f > 0) require(features, "features");
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        specgconv::Matrix a = Eigen::Map<const RowMajor>(adjacency, n, n);
        specgconv::Matrix x;
        if (f > 0) x = Eigen::Map<const RowMajor>(features, n, f);
        *out = new sgc_graph{specgconv::Graph(std::move(a), std::move(x))};
        return SGC_OK;
    });
}

void sgc_graph_free(sgc_graph* g) { delete g; }

sgc_status sgc_graph_num_nodes(const sgc_graph* g, int64_t* out) {
    return guarded([&] {
        require(g, "graph");
        require(out, "out");
        *out = g->graph.num_nodes();
        return SGC_OK;
    });
}

sgc_status sgc_graph_average_degree(const sgc_graph* g, double* out) {
    return guarded([&] {
        require(g, "graph");
        require(out, "out");
        *out = specgconv::average_degree(g->graph);
        return SGC_OK;
    });
}

sgc_status sgc_basis_compute(const sgc_graph* g, sgc_laplacian kind, const char* cache_dir, sgc_basis** out) {
    return guarded([&] {
        require(g, "graph");
        require(out, "out");
        const specgconv::LaplacianKind k = laplacian_of(kind);
        specgconv::Matrix laplacian = specgconv::build_laplacian(g->graph, k);
        const auto cache = optional_path(cache_dir);
        specgconv::SpectralBasis basis = cache ? specgconv::BasisCache(*cache).get_or_compute(laplacian, k)
                                               : specgconv::decompose(laplacian, k);
        *out = new sgc_basis{std::make_shared<const specgconv::SpectralBasis>(std::move(basis)), std::move(laplacian)};
        return SGC_OK;
    });
}

void sgc_basis_free(sgc_basis* b) { delete b; }

sgc_status sgc_basis_size(const sgc_basis* b, int64_t* out) {
    return guarded([&] {
        require(b, "basis");
        require(out, "out");
        *out = b->basis->size();
        return SGC_OK;
    });
}

sgc_status sgc_basis_lambda_max(const sgc_basis* b, double* out) {
    return guarded([&] {
        require(b, "basis");
        require(out, "out");
        *out = b->basis->lambda_max();
        return SGC_OK;
    });
}

sgc_status sgc_basis_eigenvalues(const sgc_basis* b, double* out, int64_t len) {
    return guarded([&] {
        require(b, "basis");
        require(out, "out");
        copy_out(b->basis->eigenvalues.data(), b->basis->size(), out, len);
        return SGC_OK;
    });
}

sgc_status sgc_kernels_build(const sgc_graph* g, const sgc_basis* b, const char* spec, sgc_kernels** out) {
    return guarded([&] {
        require(g, "graph");
        require(b, "basis");
        require(spec, "spec");
        require(out, "out");
        if (b->basis->size() != g->graph.num_nodes()) throw specgconv::invalid_argument("basis does not match graph");
        const specgconv::KernelRequest request = specgconv::parse_kernel_request(spec);
        *out = new sgc_kernels{specgconv::build_kernels(g->graph, b->basis, b->laplacian, request)};
        return SGC_OK;
    });
}

void sgc_kernels_free(sgc_kernels* k) { delete k; }

sgc_status sgc_kernels_count(const sgc_kernels* k, int64_t* out) {
    return guarded([&] {
        require(k, "kernels");
        require(out, "out");
        *out = static_cast<int64_t>(k->set.size());
        return SGC_OK;
    });
}

sgc_status sgc_kernels_support(const sgc_kernels* k, int64_t index, double* out, int64_t len) {
    return guarded([&] {
        require(k, "kernels");
        require(out, "out");
        if (index < 0 || index >= static_cast<int64_t>(k->set.size())) {
            throw specgconv::invalid_argument("support index out of range");
        }
        // Supports are symmetric except sampled attention kernels; copy row-major explicitly.
        const specgconv::Matrix& c = k->set.supports[static_cast<std::size_t>(index)];
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = c;
        copy_out(rm.data(), rm.size(), out, len);
        return SGC_OK;
    });
}

sgc_status sgc_profile_compute(const sgc_kernels* k, int64_t index, sgc_profile** out) {
    return guarded([&] {
        require(k, "kernels");
        require(out, "out");
        if (index < 0 || index >= static_cast<int64_t>(k->set.size())) {
            throw specgconv::invalid_argument("support index out of range");
        }
        if (!k->set.basis) throw specgconv::invalid_argument("kernel set has no spectral basis");
        const auto s = static_cast<std::size_t>(index);
        *out = new sgc_profile{
            specgconv::profile(k->set.supports[s], *k->set.basis, specgconv::to_string(k->set.provenance[s]))};
        return SGC_OK;
    });
}

void sgc_profile_free(sgc_profile* p) { delete p; }

sgc_status sgc_profile_standard(const sgc_profile* p, double* out, int64_t len) {
    return guarded([&] {
        require(p, "profile");
        require(out, "out");
        copy_out(p->profile.standard.data(), p->profile.standard.size(), out, len);
        return SGC_OK;
    });
}

sgc_status sgc_profile_offdiagonal(const sgc_profile* p, double* out) {
    return guarded([&] {
        require(p, "profile");
        require(out, "out");
        specgconv::Matrix off = p->profile.full;
        off.diagonal().setZero();
        *out = specgconv::max_abs(off);
        return SGC_OK;
    });
}

sgc_status sgc_profile_export(const sgc_profile* p, const char* standard_path, const char* full_path, int absolute) {
    return guarded([&] {
        require(p, "profile");
        require(standard_path, "standard_path");
        specgconv::export_profile(p->profile, standard_path, optional_path(full_path),
                                  specgconv::ExportOptions{absolute != 0});
        return SGC_OK;
    });
}

double sgc_gcn_cutoff(double average_degree) {
    try {
        return specgconv::gcn_cutoff(average_degree);
    } catch (const std::exception& e) {
        last_error = e.what();
        return 0.0;
    }
}

sgc_status sgc_analyze(const char* graph, const char* kernel, sgc_laplacian kind, const char* output_dir,
                       int absolute, const char* cache_dir, char** summary_json) {
    return guarded([&] {
        require(graph, "graph");
        require(kernel, "kernel");
        require(output_dir, "output_dir");
        specgconv::AnalyzeOptions options;
        options.graph = graph;
        options.kernel = kernel;
        options.laplacian = laplacian_of(kind);
        options.output_dir = output_dir;
        options.absolute = absolute != 0;
        options.cache_dir = optional_path(cache_dir);
        specgconv::run_analyze(options);
        if (summary_json) {
            std::ifstream in(options.output_dir / "summary.json");
            std::stringstream text;
            text << in.rdbuf();
            *summary_json = copy_string(text.str());
        }
        return SGC_OK;
    });
}

sgc_status sgc_train_run(const char* config_json, const char* overrides_json, const char* output_dir,
                         const char* base_dir, int strict_repro, const char* cache_dir, char** result_json) {
    return guarded([&] {
        require(config_json, "config_json");
        specgconv::TrainOptions options;
        options.config_json = config_json;
        if (overrides_json) options.overrides_json = overrides_json;
        if (output_dir) options.output_dir = output_dir;
        if (base_dir) options.base_dir = base_dir;
        options.strict_repro = strict_repro != 0;
        options.cache_dir = optional_path(cache_dir);
        const std::string result = specgconv::run_train(options);
        if (result_json) *result_json = copy_string(result);
        return SGC_OK;
    });
}

sgc_status sgc_gradcheck(uint64_t seed, int inject_fault, char** report_json) {
    return guarded([&] {
        specgconv::nn::GradcheckOptions options;
        options.seed = seed;
        options.flip_depthwise_sign = inject_fault != 0;
        const specgconv::nn::GradcheckReport report = specgconv::nn::run_gradcheck(options);
        nlohmann::ordered_json cases = nlohmann::ordered_json::array();
        for (const auto& c : report.cases) {
            cases.push_back({{"name", c.name},
                             {"num_params", c.num_params},
                             {"max_rel_error", c.max_rel_error},
                             {"passed", c.passed}});
        }
        const nlohmann::ordered_json j{{"seed", seed},
                                       {"tolerance", options.tolerance},
                                       {"step", options.step},
                                       {"inject_fault", inject_fault != 0},
                                       {"passed", report.passed},
                                       {"cases", cases}};
        if (report_json) *report_json = copy_string(j.dump(2));
        if (!report.passed) {
            last_error = "gradient check failed";
            return SGC_CHECK_FAILED;
        }
        return SGC_OK;
    });
}

} // extern "C"
