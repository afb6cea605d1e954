/// @file psim.h
/// @brief C interface to the solvers, the random-forest surrogate and the benchmarks.
///
/// Every function returns a psim_status. On failure, psim_last_error() returns a
/// message for the calling thread. Handles are opaque and freed with the matching
/// *_destroy function; destroy accepts NULL. Borrowed pointers stay valid until
/// the owning handle is destroyed.

#ifndef PSIM_H
#define PSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(PSIM_BUILDING_LIBRARY)
#define PSIM_API __attribute__((visibility("default")))
#else
#define PSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psim_status {
    PSIM_OK = 0,
    PSIM_ERR_VALIDATION = 1,   /* bad argument or configuration */
    PSIM_ERR_SOLVER = 2,       /* solver produced non-finite values */
    PSIM_ERR_IO = 3,           /* file missing or unwritable */
    PSIM_ERR_ACCURACY = 4,     /* result outside the requested tolerance */
    PSIM_ERR_PARSE = 5,        /* malformed CSV or JSON */
    PSIM_ERR_SCHEMA = 6,       /* unsupported schema_version */
    PSIM_ERR_OUT_OF_DOMAIN = 7,/* query point outside the grid or inside a hole */
    PSIM_ERR_INTERNAL = 8
} psim_status;

PSIM_API const char* psim_last_error(void);
PSIM_API const char* psim_status_name(psim_status status);
PSIM_API const char* psim_version(void);

/* ---- grids and fields ---------------------------------------------------- */

typedef struct psim_field psim_field;

/// Zero-valued nx x ny field; values are stored row by row (x fastest).
PSIM_API psim_status psim_field_create(int nx, int ny, double x_min, double x_max, double y_min, double y_max,
                                       psim_field** out);
PSIM_API void psim_field_destroy(psim_field* field);
PSIM_API psim_status psim_field_shape(const psim_field* field, int* nx, int* ny);
/// Mutable access to the nx*ny values.
PSIM_API psim_status psim_field_values(psim_field* field, double** values);
PSIM_API psim_status psim_field_bilinear(const psim_field* field, double x, double y, double* out);
/// CSV with header `x,y,value`.
PSIM_API psim_status psim_field_write_csv(const psim_field* field, const char* path);

/* ---- lid-driven cavity --------------------------------------------------- */

typedef struct psim_cavity_config {
    double re;
    int n;              /* odd */
    double dt;          /* <= 0 selects the automatic step */
    double steady_tol;
    long max_steps;
    double poisson_tol; /* <= 0 selects 100 * steady_tol */
    int poisson_max_iters;
} psim_cavity_config;

typedef struct psim_cavity psim_cavity;

PSIM_API psim_cavity_config psim_cavity_config_default(void);
PSIM_API psim_status psim_cavity_solve(const psim_cavity_config* cfg, psim_cavity** out);
PSIM_API void psim_cavity_destroy(psim_cavity* sol);
PSIM_API psim_status psim_cavity_info(const psim_cavity* sol, long* steps, int* converged, double* wall_seconds);
/// Borrowed u and v fields.
PSIM_API psim_status psim_cavity_fields(const psim_cavity* sol, const psim_field** u, const psim_field** v);
/// Writes u.csv, v.csv, centerlines.csv and summary.json into dir.
PSIM_API psim_status psim_cavity_write_outputs(const psim_cavity* sol, int centerline_points, const char* dir);
/// Centreline error against a `station,value` reference. profile is "u_vertical" or "v_horizontal".
PSIM_API psim_status psim_cavity_compare_reference(const psim_cavity* sol, const char* profile,
                                                   const char* reference_csv, double* rmse, double* mae);

/* ---- plate with a hole --------------------------------------------------- */

typedef struct psim_plate_config {
    double tension;
    double hole_radius;
    double plate_half_width;
} psim_plate_config;

PSIM_API psim_plate_config psim_plate_config_default(void);
PSIM_API psim_status psim_plate_sigma_xx(const psim_plate_config* cfg, double x, double y, double* out);
/// Writes lines.csv (`line_id,s,x,y,sigma_xx`), sigma_xx.csv (raster with a mask
/// column, grid_n x grid_n over the quarter plate) and summary.json into dir.
PSIM_API psim_status psim_plate_write_outputs(const psim_plate_config* cfg, int line_points, int grid_n,
                                              const char* dir);

/* ---- magnet -------------------------------------------------------------- */

typedef struct psim_magnet_config {
    double psi0;
    int n;  /* nodes per side over [-2, 2]^2 */
    double solver_tol;
    int max_iters;
} psim_magnet_config;

typedef struct psim_magnet psim_magnet;

PSIM_API psim_magnet_config psim_magnet_config_default(void);
PSIM_API psim_status psim_magnet_solve(const psim_magnet_config* cfg, psim_magnet** out);
PSIM_API void psim_magnet_destroy(psim_magnet* sol);
PSIM_API psim_status psim_magnet_info(const psim_magnet* sol, int* iters, int* converged, double* wall_seconds);
PSIM_API psim_status psim_magnet_fields(const psim_magnet* sol, const psim_field** psi, const psim_field** h_mag);
/// Writes psi.csv, h_mag.csv, line.csv (`s,x,y,h_mag`) and summary.json into dir.
PSIM_API psim_status psim_magnet_write_outputs(const psim_magnet* sol, const char* dir);

/* ---- datasets and forests ------------------------------------------------ */

typedef struct psim_forest_params {
    int n_trees;
    int max_depth;  /* <= 0: unlimited */
    int min_samples_leaf;
    int min_samples_split;
    int bootstrap;
} psim_forest_params;

typedef struct psim_dataset psim_dataset;
typedef struct psim_forest psim_forest;

PSIM_API psim_forest_params psim_forest_params_default(void);

PSIM_API psim_status psim_dataset_create(const char* const* feature_names, size_t n_features, psim_dataset** out);
PSIM_API psim_status psim_dataset_add_row(psim_dataset* ds, const double* features, double target);
/// Reads the named columns of a CSV file.
PSIM_API psim_status psim_dataset_read_csv(const char* path, const char* const* feature_names, size_t n_features,
                                           const char* target_name, psim_dataset** out);
PSIM_API void psim_dataset_destroy(psim_dataset* ds);
PSIM_API psim_status psim_dataset_rows(const psim_dataset* ds, size_t* rows);

PSIM_API psim_status psim_forest_fit(const psim_dataset* ds, const psim_forest_params* params, uint64_t seed, int jobs,
                                     psim_forest** out);
PSIM_API void psim_forest_destroy(psim_forest* forest);
PSIM_API psim_status psim_forest_n_features(const psim_forest* forest, size_t* n);
/// Predicts n_rows rows laid out row-major with n_features columns.
PSIM_API psim_status psim_forest_predict(const psim_forest* forest, const double* x, size_t n_rows, double* out);
PSIM_API psim_status psim_forest_save(const psim_forest* forest, const char* path);
PSIM_API psim_status psim_forest_load(const char* path, psim_forest** out);
/// Copies in_csv to out_csv with a `prediction` column appended. Features are
/// looked up by the model's feature names.
PSIM_API psim_status psim_forest_predict_csv(const psim_forest* forest, const char* in_csv, const char* out_csv);

/* ---- experiments and reports --------------------------------------------- */

typedef struct psim_report psim_report;

typedef struct psim_benchmark_options {
    uint64_t seed;
    int jobs;
    int ns_grid;
    int superres_coarse;
    int superres_fine;
} psim_benchmark_options;

/// fast != 0 selects the reduced grids (65 sweep, 33 -> 129 super-resolution).
PSIM_API psim_benchmark_options psim_benchmark_options_default(int fast);
/// id: ns, stress, em, sin-superres or ns-superres. out_dir may be NULL.
PSIM_API psim_status psim_benchmark_run(const char* id, const psim_benchmark_options* opts, const char* out_dir,
                                        psim_report** out);
/// Parameter sweep from a JSON config (SweepConfig field names). out_dir may be NULL.
PSIM_API psim_status psim_sweep_run_json(const char* config_json, int jobs, const char* out_dir, psim_report** out);
/// Super-resolution from a JSON config (SuperResConfig field names). out_dir may be NULL.
PSIM_API psim_status psim_superres_run_json(const char* config_json, int jobs, const char* out_dir, psim_report** out);
/// Canonical configs as JSON, for use as templates. problem: ns, stress, em, sin or ns-superres.
/// String outputs follow the snprintf convention: *needed receives the full length.
PSIM_API psim_status psim_default_config_json(const char* problem, char* buf, size_t cap, size_t* needed);

PSIM_API void psim_report_destroy(psim_report* report);
PSIM_API psim_status psim_report_read(const char* path, psim_report** out);
PSIM_API psim_status psim_report_write(const psim_report* report, const char* path);
/// report.json, comparison.txt and comparison.csv.
PSIM_API psim_status psim_report_write_bundle(const psim_report* report, const char* dir);
PSIM_API psim_status psim_report_measured(const psim_report* report, const char* label, const char* metric,
                                          double* out);
PSIM_API psim_status psim_report_table_text(const psim_report* report, char* buf, size_t cap, size_t* needed);
PSIM_API psim_status psim_report_table_csv(const psim_report* report, char* buf, size_t cap, size_t* needed);
PSIM_API psim_status psim_report_json(const psim_report* report, char* buf, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* PSIM_H */
