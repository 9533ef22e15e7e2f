/* C interface to the specgconv library.
 *
 * Every function returns a status code. On failure, sgc_last_error() returns
 * a message for the calling thread. Objects are opaque handles released with
 * their matching *_free function. Strings returned through char** are owned
 * by the caller and released with sgc_string_free.
 */
#ifndef SPECGCONV_H
#define SPECGCONV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SGC_API __declspec(dllexport)
#else
#define SGC_API __attribute__((visibility("default")))
#endif

typedef enum sgc_status {
    SGC_OK = 0,
    SGC_INVALID_ARGUMENT = 1,
    SGC_CONFIG_ERROR = 2,
    SGC_NUMERICAL_ERROR = 3,
    SGC_CHECK_FAILED = 4,
    SGC_IO_ERROR = 5,
    SGC_INTERNAL_ERROR = 6
} sgc_status;

typedef enum sgc_laplacian {
    SGC_LAPLACIAN_COMBINATORIAL = 0,
    SGC_LAPLACIAN_NORMALIZED = 1
} sgc_laplacian;

typedef struct sgc_graph sgc_graph;
typedef struct sgc_basis sgc_basis;
typedef struct sgc_kernels sgc_kernels;
typedef struct sgc_profile sgc_profile;

SGC_API const char* sgc_version(void);
SGC_API const char* sgc_last_error(void);
SGC_API void sgc_string_free(char* s);

/* Graphs. `spec` is ring<N>, star<N>, random:<n>:<p>:<seed> or a dataset directory. */
SGC_API sgc_status sgc_graph_resolve(const char* spec, sgc_graph** out);
/* Dense row-major n x n adjacency; features may be NULL (then f must be 0). */
SGC_API sgc_status sgc_graph_from_dense(int64_t n, const double* adjacency, int64_t f, const double* features,
                                        sgc_graph** out);
SGC_API void sgc_graph_free(sgc_graph* g);
SGC_API sgc_status sgc_graph_num_nodes(const sgc_graph* g, int64_t* out);
SGC_API sgc_status sgc_graph_average_degree(const sgc_graph* g, double* out);

/* Eigendecomposition; `cache_dir` may be NULL. */
SGC_API sgc_status sgc_basis_compute(const sgc_graph* g, sgc_laplacian kind, const char* cache_dir, sgc_basis** out);
SGC_API void sgc_basis_free(sgc_basis* b);
SGC_API sgc_status sgc_basis_size(const sgc_basis* b, int64_t* out);
SGC_API sgc_status sgc_basis_lambda_max(const sgc_basis* b, double* out);
/* Copies the ascending eigenvalues into `out` (capacity `len`). */
SGC_API sgc_status sgc_basis_eigenvalues(const sgc_basis* b, double* out, int64_t len);

/* Kernels: gcn | cheb:K | cayley:H:R | design:<expr>[;<expr>] | gat:SEED */
SGC_API sgc_status sgc_kernels_build(const sgc_graph* g, const sgc_basis* b, const char* spec, sgc_kernels** out);
SGC_API void sgc_kernels_free(sgc_kernels* k);
SGC_API sgc_status sgc_kernels_count(const sgc_kernels* k, int64_t* out);
/* Row-major copy of support `index` (0-based) into `out` (capacity `len`). */
SGC_API sgc_status sgc_kernels_support(const sgc_kernels* k, int64_t index, double* out, int64_t len);

/* Frequency profile of support `index`. */
SGC_API sgc_status sgc_profile_compute(const sgc_kernels* k, int64_t index, sgc_profile** out);
SGC_API void sgc_profile_free(sgc_profile* p);
SGC_API sgc_status sgc_profile_standard(const sgc_profile* p, double* out, int64_t len);
/* Max off-diagonal magnitude of the full profile. */
SGC_API sgc_status sgc_profile_offdiagonal(const sgc_profile* p, double* out);
/* `full_path` may be NULL; `absolute` != 0 writes magnitudes. */
SGC_API sgc_status sgc_profile_export(const sgc_profile* p, const char* standard_path, const char* full_path,
                                      int absolute);

SGC_API double sgc_gcn_cutoff(double average_degree);

/* Runs the analyze command; `summary_json` (may be NULL) receives summary.json. */
SGC_API sgc_status sgc_analyze(const char* graph, const char* kernel, sgc_laplacian kind, const char* output_dir,
                               int absolute, const char* cache_dir, char** summary_json);

/* Trains from a JSON config. `overrides_json` (may be NULL) is merged over it;
 * `output_dir` (may be NULL) overrides the config's; `base_dir` (may be NULL)
 * resolves relative paths. `result_json` receives result.json. */
SGC_API sgc_status sgc_train_run(const char* config_json, const char* overrides_json, const char* output_dir,
                                 const char* base_dir, int strict_repro, const char* cache_dir, char** result_json);

/* Finite-difference gradient suite. Returns SGC_CHECK_FAILED when any case
 * fails; `report_json` always receives the per-case report. */
SGC_API sgc_status sgc_gradcheck(uint64_t seed, int inject_fault, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SPECGCONV_H */
