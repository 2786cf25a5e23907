/* C interface to the busnet routing engine (crates/ffi).
 *
 * All functions returning int32_t use these status codes:
 *   0  success
 *   2  bad input (unknown stop, malformed time, invalid query)
 *   3  no feasible route
 *   4  data error (unreadable or corrupt graph, invariant violations)
 * On any non-zero return, busnet_last_error() describes the failure.
 */

#ifndef BUSNET_H
#define BUSNET_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BUSNET_OK 0
#define BUSNET_BAD_INPUT 2
#define BUSNET_NO_ROUTE 3
#define BUSNET_DATA_ERROR 4

/* Opaque graph handle. */
typedef struct BusnetGraph BusnetGraph;

/* Message for the most recent failure on this thread. Valid until the next
 * failing call on the same thread; never NULL; do not free. */
const char *busnet_last_error(void);

/* Loads a graph (binary or JSON form) from path into *out_graph. The handle
 * must be released with busnet_graph_free. */
int32_t busnet_graph_load(const char *path, BusnetGraph **out_graph);

/* Persists the graph to path; a .json extension selects the text form. */
int32_t busnet_graph_save(const BusnetGraph *graph, const char *path);

/* Releases a graph handle. NULL is allowed. */
void busnet_graph_free(BusnetGraph *graph);

/* Size accessors; 0 when graph is NULL. */
uint32_t busnet_graph_vertex_count(const BusnetGraph *graph);
uint32_t busnet_graph_edge_count(const BusnetGraph *graph);

/* Checks the data-model invariants; BUSNET_DATA_ERROR lists the violations
 * through busnet_last_error. */
int32_t busnet_graph_validate(const BusnetGraph *graph);

/* Answers a multi-POI query and stores the route document (JSON, UTF-8,
 * NUL-terminated) in *out_json; release it with busnet_string_free.
 *
 *   origin      stop id
 *   depart      "HH:MM[:SS]" or raw seconds since midnight
 *   pois        comma-separated stop ids
 *   dwell_json  JSON object mapping stop id to dwell seconds, or NULL
 *   mode        "naive", "ea-star", "ea-star-no-prune", "ordered", or NULL
 *               for the default ("ea-star")
 */
int32_t busnet_plan_json(const BusnetGraph *graph, const char *origin,
                         const char *depart, const char *pois,
                         const char *dwell_json, const char *mode,
                         char **out_json);

/* Frees a string returned by this library. NULL is allowed. */
void busnet_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* BUSNET_H */
