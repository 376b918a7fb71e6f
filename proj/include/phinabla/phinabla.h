/* phinabla: checks for phi-modules and (phi, nabla)-modules over the Robba ring.
 *
 * Every object crosses this boundary either as an opaque handle or as a JSON
 * string. Functions return a phn_status; on failure phn_last_error() describes
 * the problem (the message is per thread and valid until the next call).
 * Strings returned through char** are owned by the caller and released with
 * phn_string_free. */
#ifndef PHINABLA_PHINABLA_H
#define PHINABLA_PHINABLA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PHN_BUILDING_LIBRARY)
#    define PHN_API __declspec(dllexport)
#  else
#    define PHN_API __declspec(dllimport)
#  endif
#else
#  define PHN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phn_status {
  PHN_OK = 0,
  PHN_ERR_INVALID_ARGUMENT = 1,
  PHN_ERR_PARSE = 2,
  PHN_ERR_NON_PRIME = 3,
  PHN_ERR_NO_IRREDUCIBLE_POLYNOMIAL = 4,
  PHN_ERR_DIVISION_BY_ZERO = 5,
  PHN_ERR_CONTEXT_MISMATCH = 6,
  PHN_ERR_NOT_INVERTIBLE = 7,
  PHN_ERR_RANK = 8,
  PHN_ERR_UNBOUNDED_DETERMINANT = 9,
  PHN_ERR_WINDOW_INCONCLUSIVE = 10,
  PHN_ERR_MALFORMED_CERTIFICATE = 11,
  PHN_ERR_PATTERN_VIOLATION = 12,
  PHN_ERR_WILD_RAMIFICATION = 13,
  PHN_ERR_ZERO_SCALE = 14,
  PHN_ERR_INTERNAL = 15
} phn_status;

/* Ordered by severity. */
typedef enum phn_verdict {
  PHN_PASS = 0,
  PHN_PASS_AT_PRECISION = 1,
  PHN_INCONCLUSIVE = 2,
  PHN_FAIL = 3
} phn_verdict;

typedef enum phn_hom_probe {
  PHN_HOM_ONLY_ZERO = 0,
  PHN_HOM_NONZERO_FOUND = 1,
  PHN_HOM_WINDOW_INCONCLUSIVE = 2
} phn_hom_probe;

/* Coefficient field Q_{p^f} modulo p^N, Laurent window [lo, hi]. */
typedef struct phn_context {
  int p;
  int f;
  int N;
  int64_t lo;
  int64_t hi;
} phn_context;

enum {
  PHN_OVERRIDE_P = 1u << 0,
  PHN_OVERRIDE_F = 1u << 1,
  PHN_OVERRIDE_N = 1u << 2,
  PHN_OVERRIDE_WINDOW = 1u << 3
};

/* Fields selected by `mask` replace the ones stored in a parsed document. */
typedef struct phn_overrides {
  unsigned mask;
  phn_context values;
} phn_overrides;

/* One block t^{(q-1)a/m} Std(s, r) with connection (a/m) t^{-1}. */
typedef struct phn_block_spec {
  int64_t s;
  int64_t r;
  int64_t a;
  int64_t m;
} phn_block_spec;

typedef struct phn_doc phn_doc;
typedef struct phn_report phn_report;

PHN_API const char* phn_version(void);
PHN_API const char* phn_status_name(phn_status status);
PHN_API const char* phn_verdict_name(phn_verdict verdict);
PHN_API const char* phn_last_error(void);
PHN_API void phn_string_free(char* s);

/* Documents: a ring context plus any of module, certificate, pair, witness, seed. */
PHN_API phn_status phn_doc_parse(const char* json, const phn_overrides* overrides, phn_doc** out);
PHN_API phn_status phn_doc_to_json(const phn_doc* doc, int indent, char** out);
PHN_API void phn_doc_free(phn_doc* doc);

/* Generators. */
PHN_API phn_status phn_gen_standard(const phn_context* ctx, int64_t s, int64_t r, int with_nabla, phn_doc** out);
/* The rank-one Kummer seed; embedded in SL(2) unless rank_one is nonzero. */
PHN_API phn_status phn_gen_kummer(const phn_context* ctx, int64_t a, int64_t m, int rank_one, phn_doc** out);
PHN_API phn_status phn_gen_split(const phn_context* ctx, const phn_block_spec* blocks, size_t count, phn_doc** out);
/* Random unipotent change of basis; the stored certificate follows along. */
PHN_API phn_status phn_gen_scramble(const phn_doc* seed, uint64_t rng_seed, phn_doc** out);

/* Checks. */
PHN_API phn_status phn_check_gauge(const phn_doc* doc, phn_report** out);
PHN_API phn_status phn_check_pair(const phn_doc* doc, phn_report** out);
PHN_API phn_status phn_check_purity(const phn_doc* doc, int64_t s, int64_t r, phn_report** out);
PHN_API phn_status phn_verify_slopes(const phn_doc* doc, phn_report** out);
PHN_API phn_status phn_reduce(const phn_doc* doc, phn_report** out);
/* witness_json: {"m": m, "f2": f2, "b": matrix}; NULL takes the document witness
 * or rebuilds it from a Kummer seed. */
PHN_API phn_status phn_monodromy_verify(const phn_doc* doc, const char* witness_json, phn_report** out);

/* Transformations. */
PHN_API phn_status phn_pushforward(const phn_doc* doc, int64_t n, phn_doc** out);
PHN_API phn_status phn_twist(const phn_doc* doc, int64_t s, phn_doc** out);
PHN_API phn_status phn_tensor(const phn_doc* a, const phn_doc* b, phn_doc** out);
/* Newton polygon of the certificate as TSV, or SVG when svg is nonzero. */
PHN_API phn_status phn_polygon(const phn_doc* doc, int svg, char** out);

PHN_API phn_verdict phn_report_verdict(const phn_report* report);
PHN_API size_t phn_report_check_count(const phn_report* report);
PHN_API phn_status phn_report_to_json(const phn_report* report, int indent, char** out);
PHN_API void phn_report_free(phn_report* report);

PHN_API phn_status phn_rank1_hom_probe(const phn_context* ctx, int64_t a, int64_t b, phn_hom_probe* out);
/* Filtrations as {"jumps": [...], "ranks": [...]}; writes the tensor filtration. */
PHN_API phn_status phn_filtration_tensor(const char* a_json, const char* b_json, char** out);

#ifdef __cplusplus
}
#endif

#endif /* PHINABLA_PHINABLA_H */
