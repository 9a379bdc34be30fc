#ifndef INDOORLIDAR_CAPI_H
#define INDOORLIDAR_CAPI_H

/* C interface to the indoor LiDAR dataset generator and benchmark
 * toolkit. All functions return il_status; on failure il_last_error()
 * holds a thread-local message. Handles are opaque and freed with their
 * matching il_*_free function. Config arguments are JSON documents
 * passed as strings; NULL selects the built-in defaults. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IL_API __declspec(dllexport)
#else
#define IL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum il_status {
    IL_OK = 0,
    IL_ERROR_INVALID_ARGUMENT = 1,
    IL_ERROR_IO = 2,
    IL_ERROR_PARSE = 3,
    IL_ERROR_VALIDATION = 4,
    IL_ERROR_INTERNAL = 5
} il_status;

typedef struct il_scene il_scene;

IL_API const char* il_version(void);
IL_API const char* il_last_error(void);

/* --- scenes --------------------------------------------------------- */

IL_API il_status il_scene_generate(const char* scene_config_json,
                                   uint64_t seed, il_scene** out_scene);
IL_API il_status il_scene_load(const char* path, il_scene** out_scene);
IL_API il_status il_scene_save(const il_scene* scene, const char* path);
/* violation_count receives the number of invariant violations (0 = valid);
 * either pointer may be NULL. report_json receives a JSON array, freed
 * with il_string_free. */
IL_API il_status il_scene_validate(const il_scene* scene,
                                   int* violation_count, char** report_json);
IL_API int il_scene_object_count(const il_scene* scene);
IL_API void il_scene_free(il_scene* scene);

/* --- simulation ----------------------------------------------------- */

/* Simulates one revolution from pose (x, y, z, yaw_radians) and writes
 * velodyne/<frame_id>.bin, label_2/<frame_id>.txt, times.txt and
 * poses.txt under out_dir. */
IL_API il_status il_scan_frame(const il_scene* scene,
                               const double pose_xyzyaw[4],
                               const char* sensor_config_json, uint64_t seed,
                               int workers, const char* out_dir,
                               const char* frame_id, uint64_t timestamp_ns,
                               int min_points);

/* Full batch run from a resolved run-config JSON document. */
IL_API il_status il_run_dataset(const char* run_config_json, int workers);

/* --- evaluation and export ------------------------------------------ */

IL_API il_status il_evaluate(const char* gt_dir, const char* det_dir,
                             const char* out_dir, double match_threshold);

/* extent is {x_min, x_max, y_min, y_max}; NULL derives it from the
 * cloud bounds. */
IL_API il_status il_bev_rasterize(const char* cloud_path, double cell_size,
                                  const double* extent,
                                  const char* out_prefix);

/* Statistics of a dataset tree as JSON, freed with il_string_free. */
IL_API il_status il_dataset_info(const char* dataset_root, char** out_json);

IL_API void il_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* INDOORLIDAR_CAPI_H */
