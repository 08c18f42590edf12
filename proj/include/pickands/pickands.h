#ifndef PICKANDS_PICKANDS_H
#define PICKANDS_PICKANDS_H

/*
 * C interface of libpickands: Monte Carlo estimation of Pickands-type
 * constants H_W^delta and extremal indices theta = delta * H_W^delta of
 * Brown-Resnick stationary processes W(t) = B(t) - ln E e^{B(t)}.
 *
 * Every function returns a pk_status. On failure the thread-local message
 * returned by pk_last_error_message() describes the problem. Handles are
 * opaque and must be released with the matching *_destroy function.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define PICKANDS_API __declspec(dllexport)
#else
#  define PICKANDS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pk_status {
  PK_OK = 0,
  PK_ERR_INVALID_ARGUMENT = 1,
  PK_ERR_OUT_OF_RANGE = 2,      /* tabulated variance queried outside its table */
  PK_ERR_DOMAIN = 3,            /* moment generating function infinite, ... */
  PK_ERR_MODEL = 4,             /* covariance not PSD, degenerate Levy model */
  PK_ERR_UNSUPPORTED = 5,       /* e.g. two-sided formula on a Levy model */
  PK_ERR_INSUFFICIENT_DATA = 6, /* fewer than 2 replications, empty input */
  PK_ERR_INTERNAL = 7
} pk_status;

typedef struct pk_model pk_model;
typedef struct pk_maxstable_sim pk_maxstable_sim;

typedef enum pk_jump_kind {
  PK_JUMP_NONE = 0,
  PK_JUMP_CONSTANT = 1,    /* J == a */
  PK_JUMP_NORMAL = 2,      /* J ~ N(a, b^2) */
  PK_JUMP_EXPONENTIAL = 3  /* J ~ Exp(rate a), requires a > 1 */
} pk_jump_kind;

typedef enum pk_method {
  PK_METHOD_DEFINITIONAL = 0,
  PK_METHOD_EXCEEDANCE = 1,
  PK_METHOD_DIFFERENCE = 2,
  PK_METHOD_ARGMAX = 3,
  PK_METHOD_ARGMAX_ATOMLESS = 4,
  PK_METHOD_DIEKER_YAKIR = 5,
  PK_METHOD_TIME_REVERSED = 6,
  PK_METHOD_CONTINUOUS_DY = 7,
  PK_METHOD_CANDIDATE_THETA = 8,
  PK_METHOD_EXTREMAL_BLOCKS = 9
} pk_method;

/* Bits of pk_estimate.flags */
#define PK_FLAG_UNSTABLE 1u         /* truncation did not stabilize */
#define PK_FLAG_LOW_COUNT 2u        /* fewer than 30 events observed */
#define PK_FLAG_TRUNCATION_BIAS 4u  /* max-stable atom cap or bound violated */
#define PK_FLAG_WINDOW 8u           /* continuous window did not stabilize */

typedef struct pk_policy {
  int64_t initial_horizon;
  double growth;
  double stability; /* relative to the standard error */
  int64_t max_horizon;
} pk_policy;

typedef struct pk_run_params {
  int64_t replications;
  uint64_t seed;
  pk_policy policy;
  double horizon_time; /* T for the definitional estimator */
  double mesh;         /* eta for the continuous estimator */
  double window;       /* half-width of the continuous window */
  int32_t refine;      /* numerator mesh refinement for the continuous estimator */
} pk_run_params;

typedef struct pk_estimate {
  int32_t method;
  double delta;
  double estimate;
  double std_error;
  int64_t replications;
  int64_t horizon;
  int32_t stable;
  uint64_t seed;
  uint32_t flags;
  int64_t events;            /* indicator hits, -1 where not meaningful */
  double previous_estimate;  /* at the previous horizon or half window */
} pk_estimate;

typedef struct pk_bound {
  double value;
  double series;            /* partial sum of the series, where one is involved */
  double series_tail_bound;
  int64_t terms;
  int32_t clamped;
  int32_t tail_unbounded;
} pk_bound;

typedef struct pk_ln8_report {
  double tail_min_ratio;
  double last_ratio;
  int32_t holds;
} pk_ln8_report;

typedef struct pk_probability {
  double probability;
  double std_error;
  int64_t replications;
} pk_probability;

typedef struct pk_maxstable_info {
  int64_t atoms_used;
  int32_t truncation_bias;
} pk_maxstable_info;

typedef struct pk_fdd_check {
  double empirical;
  double empirical_se;
  double oracle;
  double oracle_se;
  double z_score;
  int32_t pass;
  int32_t truncation_bias;
} pk_fdd_check;

typedef struct pk_ks_report {
  double statistic;
  double p_value;
  int64_t samples;
  int32_t pass;
  int32_t truncation_bias;
} pk_ks_report;

typedef struct pk_tail_check {
  double ks_distance;
  int64_t samples;
  int64_t trials;
  int32_t pass;
} pk_tail_check;

typedef struct pk_smallball_row {
  double eta;
  int64_t cutoff;
  double probability;
  double std_error;
  double scaled;
  double scaled_se;
  int64_t replications;
  int32_t stable;
  int32_t factorized;
  double direct;    /* joint two-sided frequency */
  double direct_se;
} pk_smallball_row;

typedef struct pk_extrapolation {
  double intercept;
  double std_error;
  double slope;
  int32_t fit_warning;
} pk_extrapolation;

/* Library */
PICKANDS_API const char* pk_version(void);
PICKANDS_API const char* pk_last_error_message(void);
PICKANDS_API pk_status pk_set_threads(int32_t threads); /* 0: PICKANDS_THREADS or hardware */
PICKANDS_API const char* pk_method_name(pk_method method);
PICKANDS_API pk_status pk_method_parse(const char* name, pk_method* out);
PICKANDS_API pk_policy pk_policy_default(void);
PICKANDS_API pk_run_params pk_run_params_default(void);

/* Models */
PICKANDS_API pk_status pk_model_create_power(double alpha, pk_model** out);
PICKANDS_API pk_status pk_model_create_scaled_power(double alpha, double scale, pk_model** out);
PICKANDS_API pk_status pk_model_create_tabulated(const double* times, const double* values,
                                                 size_t count, pk_model** out);
PICKANDS_API pk_status pk_model_create_levy(double diffusion, double jump_rate, pk_jump_kind jump,
                                            double jump_a, double jump_b, pk_model** out);
PICKANDS_API void pk_model_destroy(pk_model* model);
PICKANDS_API int32_t pk_model_is_gaussian(const pk_model* model);
PICKANDS_API pk_status pk_model_variance_at(const pk_model* model, double t, double* out);
PICKANDS_API pk_status pk_model_laplace_exponent(const pk_model* model, double theta, double* out);
/* Writes W(delta*i), i in [i_min, i_max], into w (length i_max - i_min + 1). */
PICKANDS_API pk_status pk_model_sample_path(const pk_model* model, double delta, int64_t i_min,
                                            int64_t i_max, uint64_t seed, uint64_t index,
                                            double* w, size_t len);

/* Estimators */
PICKANDS_API pk_status pk_estimate_run(const pk_model* model, pk_method method, double delta,
                                       const pk_run_params* params, pk_estimate* out);
/* Common random numbers: one path per replication shared by all methods. */
PICKANDS_API pk_status pk_estimate_shared(const pk_model* model, const pk_method* methods,
                                          size_t count, double delta,
                                          const pk_run_params* params, pk_estimate* out);

/* Bounds */
PICKANDS_API pk_status pk_bound_gaussian(const pk_model* model, double delta, pk_bound* out);
PICKANDS_API pk_status pk_bound_power(double c, double kappa, double delta, pk_bound* out);
PICKANDS_API pk_status pk_bound_levy(const pk_model* model, double delta, pk_bound* out);
PICKANDS_API pk_status pk_bound_levy_h0(const pk_model* model, pk_bound* out);
PICKANDS_API pk_status pk_check_ln8(const pk_model* model, double horizon, pk_ln8_report* out);

/* Max-stable process */
PICKANDS_API pk_status pk_maxstable_create(const pk_model* model, double delta, int64_t i_min,
                                           int64_t i_max, int64_t atom_cap, uint64_t seed,
                                           pk_maxstable_sim** out);
PICKANDS_API void pk_maxstable_destroy(pk_maxstable_sim* sim);
PICKANDS_API pk_status pk_maxstable_sample(const pk_maxstable_sim* sim, uint64_t index,
                                           double* zeta, size_t len, pk_maxstable_info* info);
PICKANDS_API pk_status pk_fdd_probability(const pk_model* model, const double* times,
                                          const double* thresholds, size_t count,
                                          int64_t replications, uint64_t seed,
                                          pk_probability* out);
PICKANDS_API pk_status pk_maxstable_check_fdd(const pk_model* model, double delta,
                                              const double* times, const double* thresholds,
                                              size_t count, int64_t samples,
                                              int64_t oracle_replications, uint64_t seed,
                                              pk_fdd_check* out);
PICKANDS_API pk_status pk_maxstable_check_marginal(const pk_model* model, double delta,
                                                   int64_t i_max, int64_t point, int64_t samples,
                                                   uint64_t seed, pk_ks_report* out);
/* Law of zeta(delta)/threshold given zeta(0) > threshold against Y(1) = P e^{W(delta)}. */
PICKANDS_API pk_status pk_maxstable_check_tail(const pk_model* model, double delta,
                                               double threshold, int64_t samples, uint64_t seed,
                                               pk_tail_check* out);
PICKANDS_API pk_status pk_extremal_index_blocks(const pk_model* model, double delta, int64_t n,
                                                int64_t block, int64_t replications,
                                                uint64_t seed, pk_estimate* out);

/* Small-ball probabilities of standard fBm on the reciprocal grid */
/* cutoff is the initial K, doubled until stable up to max_cutoff (0: default). */
PICKANDS_API pk_status pk_smallball_prob(double alpha, double eta, int64_t cutoff,
                                         int64_t max_cutoff, int64_t replications, uint64_t seed,
                                         pk_smallball_row* out);
PICKANDS_API pk_status pk_smallball_extrapolate(const pk_smallball_row* rows, size_t count,
                                                pk_extrapolation* out);

#ifdef __cplusplus
}
#endif

#endif /* PICKANDS_PICKANDS_H */
