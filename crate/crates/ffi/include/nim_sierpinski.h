/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef NIM_SIERPINSKI_H
#define NIM_SIERPINSKI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NsStatus {
  NS_STATUS_OK = 0,
  NS_STATUS_NULL_POINTER = 1,
  NS_STATUS_INVALID_ARGUMENT = 2,
  NS_STATUS_BUDGET_EXCEEDED = 3,
  NS_STATUS_ILLEGAL_MOVE = 4,
  NS_STATUS_WRONG_TURN = 5,
  NS_STATUS_TERMINAL_GAME = 6,
  NS_STATUS_BUFFER_TOO_SMALL = 7,
  NS_STATUS_IO = 8,
  NS_STATUS_PANIC = 9,
} NsStatus;

typedef enum NsMethod {
  NS_METHOD_RECURSIVE = 0,
  NS_METHOD_FILTERED = 1,
  NS_METHOD_STREAM = 2,
} NsMethod;

typedef enum NsFormat {
  NS_FORMAT_CSV = 0,
  NS_FORMAT_JSONL = 1,
  NS_FORMAT_OBJ = 2,
  NS_FORMAT_SVG = 3,
} NsFormat;

typedef enum NsOpponent {
  NS_OPPONENT_RANDOM = 0,
  NS_OPPONENT_PERFECT = 1,
} NsOpponent;

typedef enum NsGameStatus {
  NS_GAME_STATUS_IN_PROGRESS = 0,
  NS_GAME_STATUS_HUMAN_WON = 1,
  NS_GAME_STATUS_ENGINE_WON = 2,
} NsGameStatus;

typedef enum NsPlayer {
  NS_PLAYER_HUMAN = 0,
  NS_PLAYER_ENGINE = 1,
} NsPlayer;

// Opaque game session handle.
typedef struct NsGame NsGame;

// Opaque point set handle.
typedef struct NsPointSet NsPointSet;

typedef struct NsMove {
  size_t pile_index;
  uint64_t new_size;
} NsMove;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static, NUL-terminated description of a status code.
const char *ns_status_message(enum NsStatus status);

// Nim-sum of `len` values. `values` may be NULL when `len` is 0.
//
// # Safety
// `values` must point to `len` readable `uint64_t`s when `len > 0`.
enum NsStatus ns_nim_sum(const uint64_t *values, size_t len, uint64_t *out);

// Sets `*out_is_p` to true for a P-position (nim-sum zero).
//
// # Safety
// `piles` must point to `len` readable values; `out_is_p` must be writable.
enum NsStatus ns_classify(const uint64_t *piles, size_t len, bool *out_is_p);

// Winning move from an N-position. `*out_found` is false at a P-position and
// `*out_move` is left untouched.
//
// # Safety
// `piles` must point to `len` readable values; both out pointers must be writable.
enum NsStatus ns_optimal_move(const uint64_t *piles,
                              size_t len,
                              struct NsMove *out_move,
                              bool *out_found);

// Membership in the demihypercube via high/low decomposition.
//
// # Safety
// `coords` must point to `len` readable values; `out` must be writable.
enum NsStatus ns_membership_recursive(const uint64_t *coords, size_t len, bool *out);

// Builds iteration `n` in dimension `d`. On success `*out` owns a new handle.
//
// # Safety
// `out` must be writable.
enum NsStatus ns_pointset_generate(size_t d,
                                   uint32_t n,
                                   enum NsMethod method,
                                   uint32_t budget_exponent,
                                   struct NsPointSet **out);

// # Safety
// `ps` must be a live handle from [`ns_pointset_generate`] or NULL.
size_t ns_pointset_len(const struct NsPointSet *ps);

// # Safety
// `ps` must be a live handle or NULL.
size_t ns_pointset_dim(const struct NsPointSet *ps);

// # Safety
// `ps` must be a live handle or NULL.
uint32_t ns_pointset_exponent(const struct NsPointSet *ps);

// Copies point `index` into `out_coords`, which must hold `capacity >= dim` values.
//
// # Safety
// `ps` must be a live handle; `out_coords` must have room for `capacity` values.
enum NsStatus ns_pointset_get(const struct NsPointSet *ps,
                              size_t index,
                              uint64_t *out_coords,
                              size_t capacity);

// Renders the set in `format`. `*out` receives a string to release with
// [`ns_string_free`].
//
// # Safety
// `ps` must be a live handle; `out` must be writable.
enum NsStatus ns_pointset_export(const struct NsPointSet *ps, enum NsFormat format, char **out);

// # Safety
// `ps` must be NULL or a handle not yet freed.
void ns_pointset_free(struct NsPointSet *ps);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void ns_string_free(char *s);

// Compares the recursive and filtered constructions of iteration `n`.
//
// # Safety
// Both out pointers must be writable.
enum NsStatus ns_verify_theorem(size_t d,
                                uint32_t n,
                                uint32_t budget_exponent,
                                bool *out_equal,
                                uint64_t *out_cardinality);

// Sets `*out_all_ones` when every cell of the shadow along `axis` is hit once.
//
// # Safety
// `out_all_ones` must be writable.
enum NsStatus ns_shadow_all_ones(size_t d,
                                 uint32_t n,
                                 size_t axis,
                                 uint32_t budget_exponent,
                                 bool *out_all_ones);

// Engine-first games against `opponent`, seeded for reproducibility.
//
// # Safety
// `piles` must point to `len` readable values; out pointers must be writable.
enum NsStatus ns_simulate(const uint64_t *piles,
                          size_t len,
                          enum NsOpponent opponent,
                          uint64_t trials,
                          uint64_t seed,
                          uint64_t *out_engine_wins,
                          uint64_t *out_engine_losses);

// Starts a game. When the engine moves first it does not move until
// [`ns_game_engine_move`] is called.
//
// # Safety
// `piles` must point to `len` readable values; `out` must be writable.
enum NsStatus ns_game_new(const uint64_t *piles, size_t len, bool human_first, struct NsGame **out);

// # Safety
// `game` must be a live handle.
enum NsStatus ns_game_apply_human_move(struct NsGame *game, struct NsMove m);

// # Safety
// `game` must be a live handle; `out_move` must be writable.
enum NsStatus ns_game_engine_move(struct NsGame *game, struct NsMove *out_move);

// # Safety
// `game` must be a live handle; `out` must be writable.
enum NsStatus ns_game_status(const struct NsGame *game, enum NsGameStatus *out);

// # Safety
// `game` must be a live handle; `out` must be writable.
enum NsStatus ns_game_to_move(const struct NsGame *game, enum NsPlayer *out);

// Copies the pile sizes into `out_piles`. `*out_len` always receives the
// pile count, so a short buffer can be resized and the call repeated.
//
// # Safety
// `game` must be a live handle; `out_piles` must hold `capacity` values.
enum NsStatus ns_game_position(const struct NsGame *game,
                               uint64_t *out_piles,
                               size_t capacity,
                               size_t *out_len);

// # Safety
// `game` must be NULL or a handle not yet freed.
void ns_game_free(struct NsGame *game);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NIM_SIERPINSKI_H */
