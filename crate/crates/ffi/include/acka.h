#ifndef ACKA_H
#define ACKA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum AckaStatus {
  ACKA_STATUS_OK = 0,
  ACKA_STATUS_NULL_POINTER = 1,
  ACKA_STATUS_INVALID_ARGUMENT = 2,
  ACKA_STATUS_INVALID_CONFIG = 3,
  ACKA_STATUS_SIMULATION = 4,
  ACKA_STATUS_PARSE = 5,
  ACKA_STATUS_PANIC = 6,
} AckaStatus;

typedef enum AckaAdversaryKind {
  ACKA_ADVERSARY_KIND_HONEST = 0,
  ACKA_ADVERSARY_KIND_ALWAYS_Z = 1,
  ACKA_ADVERSARY_KIND_GUESS_KEYGEN = 2,
} AckaAdversaryKind;

// Opaque network configuration.
typedef struct AckaConfig AckaConfig;

// Opaque finished run.
typedef struct AckaRun AckaRun;

typedef struct AckaSummary {
  size_t keygen;
  size_t verification;
  size_t verification_failed;
  // NaN without Verification rounds.
  double pass_rate;
  // NaN without KeyGen rounds.
  double keygen_agreement;
  double threshold;
  bool accepted;
} AckaSummary;

typedef struct AckaSecurityReport {
  double d_eff;
  double eta;
  double r_f;
  double eta_prime;
  double p_no_fail;
  double p_worst;
  double p_corrected;
  double h_worst;
  double h_corrected;
  // Meaningful only when `has_key_rate` is set.
  double effective_key_rate;
  bool has_key_rate;
  // Effective D below 2.
  bool degenerate_d;
} AckaSecurityReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next call on the same thread.
const char *acka_last_error(void);

// Library version as a static NUL-terminated string.
const char *acka_version(void);

// Creates a noiseless, honest configuration.
//
// # Safety
// `participants` must point to `num_participants` readable values and
// `out` must be writable.
enum AckaStatus acka_config_new(size_t n,
                                size_t sender,
                                const size_t *participants,
                                size_t num_participants,
                                double d,
                                size_t rounds,
                                uint64_t seed,
                                struct AckaConfig **out);

// Creates a configuration from a preset label `'A'`..`'F'`.
//
// # Safety
// `out` must be writable.
enum AckaStatus acka_config_from_preset(char label,
                                        double d,
                                        size_t rounds,
                                        uint64_t seed,
                                        struct AckaConfig **out);

// Parses a configuration file's text.
//
// # Safety
// `text` must be a NUL-terminated string and `out` writable.
enum AckaStatus acka_config_parse(const char *text, struct AckaConfig **out);

// Sets global white noise with the given target fidelity (1 = noiseless).
//
// # Safety
// `config` must be a live handle.
enum AckaStatus acka_config_set_fidelity(struct AckaConfig *config, double fidelity);

// Makes non-participant `party` an adversary. `p_guess` is read only for
// `GuessKeygen`.
//
// # Safety
// `config` must be a live handle.
enum AckaStatus acka_config_set_adversary(struct AckaConfig *config,
                                          size_t party,
                                          enum AckaAdversaryKind kind,
                                          double p_guess);

// # Safety
// `config` must be NULL or a handle not yet freed.
void acka_config_free(struct AckaConfig *config);

// Runs the protocol. The configuration handle stays owned by the caller.
//
// # Safety
// `config` must be a live handle and `out` writable.
enum AckaStatus acka_run(const struct AckaConfig *config, struct AckaRun **out);

// # Safety
// `run` must be a live handle and `out` writable.
enum AckaStatus acka_run_summary(const struct AckaRun *run, struct AckaSummary *out);

// Copies a key into `buf`. Slot 0 is the sender, slot `i` the `i`-th
// participant in ascending index order. `*len` receives the key length;
// pass a NULL `buf` to query it. Each byte is 0 or 1.
//
// # Safety
// `run` must be a live handle, `len` writable, and `buf` NULL or writable
// for `capacity` bytes.
enum AckaStatus acka_run_key(const struct AckaRun *run,
                             size_t slot,
                             uint8_t *buf,
                             size_t capacity,
                             size_t *len);

// Public transcript text, owned by the run handle.
//
// # Safety
// `run` must be NULL or a live handle.
const char *acka_run_public_transcript(const struct AckaRun *run);

// Sender-private transcript text, owned by the run handle.
//
// # Safety
// `run` must be NULL or a live handle.
const char *acka_run_private_transcript(const struct AckaRun *run);

// # Safety
// `run` must be NULL or a handle not yet freed.
void acka_run_free(struct AckaRun *run);

// Security figures for the given counts. A negative or NaN `raw_rate`
// means no rate is known.
//
// # Safety
// `out` must be writable.
enum AckaStatus acka_security_report(size_t num_keygen,
                                     size_t num_verification,
                                     size_t num_failed,
                                     double fidelity,
                                     double raw_rate,
                                     struct AckaSecurityReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ACKA_H */
