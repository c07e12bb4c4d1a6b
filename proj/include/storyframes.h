#ifndef STORYFRAMES_H
#define STORYFRAMES_H

/* C interface to the storyframes library. Handles are opaque; every
 * function that can fail returns an sf_status and leaves a description
 * in the calling thread's sf_last_error(). Nonzero status values equal
 * the CLI exit codes for the corresponding failure stage. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sf_status {
    SF_OK = 0,
    SF_ERR_ARGS = 2,      /* invalid arguments or parameters */
    SF_ERR_INGEST = 3,    /* text acquisition or cleaning */
    SF_ERR_TRANSLATE = 4, /* translation client */
    SF_ERR_BACKEND = 5,   /* image generation service */
    SF_ERR_IO = 6         /* filesystem */
} sf_status;

typedef struct sf_image sf_image;
typedef struct sf_mask sf_mask;
typedef struct sf_chunks sf_chunks;

const char* sf_version(void);

/* Message and short error name (e.g. "BadDims") from the last failing
 * call on this thread; valid until the thread's next sf_ call. */
const char* sf_last_error(void);
const char* sf_last_error_name(void);

/* ---- text ---- */

/* Strips markup, URLs and control characters; *out_text is heap
 * allocated, release with sf_string_free. */
sf_status sf_clean_text(const char* raw, char** out_text);
void sf_string_free(char* s);

/* method: "by-line", "by-sentence", "sentence-window",
 * "line-pair-stack"; window/stride apply to sentence-window only. */
sf_status sf_chunk_text(const char* cleaned, const char* method, int window, int stride,
                        sf_chunks** out);
size_t sf_chunks_count(const sf_chunks* chunks);
const char* sf_chunks_get(const sf_chunks* chunks, size_t index);
void sf_chunks_free(sf_chunks* chunks);

/* ---- masks ---- */

sf_status sf_mask_edge(int width, int height, int edge_width, sf_mask** out);
/* dots_fixed nonzero inverts the lattice polarity. */
sf_status sf_mask_dotted(int width, int height, int spacing, int edge_width, int dots_fixed,
                         sf_mask** out);
/* shape: "rect" or "ellipse"; extent in (0,1]. */
sf_status sf_mask_center(int width, int height, const char* shape, double extent, sf_mask** out);
sf_status sf_mask_random_ellipse(int width, int height, uint64_t seed, sf_mask** out);
size_t sf_mask_editable_count(const sf_mask* mask);
int sf_mask_editable_at(const sf_mask* mask, int row, int col);
/* Single-channel PNG, 255 = editable. */
sf_status sf_mask_save_png(const sf_mask* mask, const char* path);
void sf_mask_free(sf_mask* mask);

/* ---- images ---- */

sf_status sf_image_load_png(const char* path, sf_image** out);
sf_status sf_image_save_png(const sf_image* image, const char* path);
int sf_image_width(const sf_image* image);
int sf_image_height(const sf_image* image);
/* Row-major RGBA8, width*height*4 bytes, owned by the image. */
const uint8_t* sf_image_pixels(const sf_image* image);
void sf_image_free(sf_image* image);

sf_status sf_image_match_saturation(const sf_image* frame, const sf_image* reference,
                                    sf_image** out);
/* boxes: n_boxes * 4 ints, each min_row,min_col,max_row,max_col
 * (inclusive). */
sf_status sf_image_inpaint(const sf_image* image, const int* boxes, size_t n_boxes,
                           sf_image** out);

/* ---- full pipeline ---- */

/* options_json uses the run config schema (same keys as the CLI flags).
 * On success *manifest_json_out receives the run manifest; release with
 * sf_string_free. On failure the manifest, if any was written, stays in
 * the output directory. */
sf_status sf_story_run_json(const char* options_json, char** manifest_json_out);

#ifdef __cplusplus
}
#endif

#endif /* STORYFRAMES_H */
