#ifndef FOREST_FOREST_H
#define FOREST_FOREST_H

/*
 * C interface to the forest regex-validation synthesizer.
 *
 * Every handle is opaque and owned by the caller, who releases it with the
 * matching *_free function. Functions returning forest_status set a message
 * readable with forest_last_error() on failure. Strings returned through
 * char** are heap copies released with forest_string_free(); const char*
 * results point into the handle and stay valid until the next call that
 * modifies it.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FOREST_API __declspec(dllexport)
#else
#define FOREST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum forest_status {
    FOREST_OK = 0,
    FOREST_E_ARGUMENT = 1,   /* null handle, unknown option or bad value */
    FOREST_E_FORMAT = 2,     /* malformed examples, regex or condition */
    FOREST_E_STATE = 3,      /* not allowed in the session's current state */
    FOREST_E_IO = 4,         /* unreadable file or unusable port */
    FOREST_E_GENERATION = 5, /* language too small to sample from */
    FOREST_E_INTERNAL = 6
} forest_status;

typedef enum forest_step {
    FOREST_STEP_QUESTION = 0,
    FOREST_STEP_DONE = 1,
    FOREST_STEP_FAILED = 2,
    FOREST_STEP_BEST_EFFORT = 3 /* timed out with a candidate */
} forest_step;

typedef enum forest_phase {
    FOREST_PHASE_REGEX_SEARCH = 0,
    FOREST_PHASE_REGEX_QUESTION = 1,
    FOREST_PHASE_CAPTURE_SEARCH = 2,
    FOREST_PHASE_CAPTURE_QUESTION = 3,
    FOREST_PHASE_DONE = 4,
    FOREST_PHASE_FAILED = 5
} forest_phase;

typedef enum forest_verdict {
    FOREST_ACCEPT = 0,
    FOREST_REJECT_FORMAT = 1,    /* no match */
    FOREST_REJECT_CONDITIONS = 2 /* match, but a capture condition fails */
} forest_verdict;

typedef struct forest_options forest_options;
typedef struct forest_session forest_session;
typedef struct forest_validation forest_validation;

typedef struct forest_stats {
    uint64_t programs_enumerated;
    int questions;
    int regex_questions;
    int capture_questions;
    double seconds;
    int question_cap_hit; /* 1 if a stage stopped at max_questions */
} forest_stats;

FOREST_API const char* forest_version(void);
FOREST_API const char* forest_status_name(forest_status status);
/* Message of the last failed call on this thread, "" if none. */
FOREST_API const char* forest_last_error(void);
FOREST_API void forest_string_free(char* s);

/*
 * Options are string key/value pairs:
 *   mode           multitree | ktree
 *   pruning        on | off
 *   split          on | off       (off forces the dynamic schedule)
 *   accept_first   on | off
 *   timeout        seconds
 *   max_questions  per stage
 *   solver         path to an SMT-LIB solver, or "builtin"
 *   solver_timeout seconds per check
 *   seed, subsample, jobs, held_out     (benchmarks)
 *   max_sessions, idle_timeout, cors_origin   (service)
 */
FOREST_API forest_status forest_options_new(forest_options** out);
FOREST_API void forest_options_free(forest_options* options);
FOREST_API forest_status forest_options_set(forest_options* options, const char* key, const char* value);

/* options may be NULL for defaults. */
FOREST_API forest_status forest_session_new(const char* const* valid, size_t n_valid, const char* const* invalid,
                                            size_t n_invalid, const char* const* conditional_invalid,
                                            size_t n_conditional_invalid, const forest_options* options,
                                            forest_session** out);
/* Sectioned example text: "++" valid, "--" invalid, "+-" conditional invalid. */
FOREST_API forest_status forest_session_from_text(const char* examples, const forest_options* options,
                                                  forest_session** out);
FOREST_API void forest_session_free(forest_session* session);

/* Runs until a question is pending or the session ends. */
FOREST_API forest_status forest_session_advance(forest_session* session, forest_step* out);
/* NULL when no question is pending. */
FOREST_API const char* forest_session_question(const forest_session* session);
FOREST_API forest_phase forest_session_phase(const forest_session* session);
/* FOREST_E_STATE when no question is pending. */
FOREST_API forest_status forest_session_answer(forest_session* session, int valid);
FOREST_API forest_status forest_session_abort(forest_session* session);

/* Emitted regex of the result, NULL before one exists. */
FOREST_API const char* forest_session_regex(const forest_session* session);
FOREST_API size_t forest_session_condition_count(const forest_session* session);
/* Condition i formatted as "$g <= b" or "$g >= b"; NULL when out of range. */
FOREST_API const char* forest_session_condition(const forest_session* session, size_t i);
/* Questions asked so far, oldest first. */
FOREST_API size_t forest_session_transcript_count(const forest_session* session);
/* captures is 1 for value questions; any out pointer may be NULL. */
FOREST_API forest_status forest_session_transcript_entry(const forest_session* session, size_t i,
                                                         const char** question, int* captures, int* valid);
/* Failure reason, "" unless the session failed. */
FOREST_API const char* forest_session_failure(const forest_session* session);
FOREST_API forest_status forest_session_stats(const forest_session* session, forest_stats* out);
/* {regex, conditions[], stats{programs_enumerated, questions, seconds}, transcript[], state, reason} */
FOREST_API forest_status forest_session_json(const forest_session* session, char** out);

/* Regex on the first line, conditions on the following lines. */
FOREST_API forest_status forest_validation_parse(const char* text, forest_validation** out);
FOREST_API void forest_validation_free(forest_validation* validation);
FOREST_API forest_status forest_validation_classify(const forest_validation* validation, const char* input,
                                                    forest_verdict* out);
/* {matches, captures|null, satisfies_conditions|null} */
FOREST_API forest_status forest_validation_eval_json(const forest_validation* validation, const char* input,
                                                     char** out);

/* Seeded examples in the sectioned text format. */
FOREST_API forest_status forest_generate_examples(const forest_validation* truth, size_t n_valid, size_t n_invalid,
                                                  size_t n_conditional_invalid, uint64_t seed, char** out);

/*
 * Runs every case of corpus_dir (cases/<name>/examples.txt + truth.txt)
 * under each comma-separated mode (multitree, ktree, no-pruning,
 * dynamic-only). table and csv may be NULL.
 */
FOREST_API forest_status forest_bench_run(const char* corpus_dir, const char* modes, const forest_options* options,
                                          char** table, char** csv);

/* Serves the HTTP session API; blocks until the process ends. */
FOREST_API forest_status forest_serve(const char* host, int port, const forest_options* options);

#ifdef __cplusplus
}
#endif

#endif
