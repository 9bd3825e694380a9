"""
Console message templates.

All user-facing command output is defined here for consistent wording.

Template naming convention:
- *_DONE - command completion lines
- WARN_* - diagnostics outside their thresholds
- ERROR_* - error messages
"""

# =============================================================================
# Completion Messages
# =============================================================================

FIT_DONE = """
Fitted {variant}: {n_chains} chains x {n_draws} draws
R-hat range: [{rhat_low:.3f}, {rhat_high:.3f}]
Divergences: {divergences}
WAIC {waic:.1f} (se {waic_se:.1f}), LOOIC {looic:.1f} (se {looic_se:.1f})
Outputs: {out_dir}
""".strip()

DIAGNOSE_DONE = """
Diagnosed {variant}: {n_chains} chains x {n_draws} draws
R-hat range: [{rhat_low:.3f}, {rhat_high:.3f}]
Report: {path}
""".strip()

COMPARE_DONE = """
Compared {n_models} runs
{table}
Table: {path}
""".strip()

SIMULATE_DONE = "Simulated {variant}: T={n_times}, S={n_sites}, missing={n_missing} -> {path}"

INGEST_DONE = "Ingested T={n_times}, S={n_sites}, missing={n_missing} -> {path}"

# =============================================================================
# Warnings
# =============================================================================

WARN_RHAT = "R-hat of {count} parameters is at or above {threshold}"

WARN_DIVERGENCES = "{count} divergent transitions after warmup"

WARN_PARETO_K = "{count} points have Pareto k above {threshold}"

# =============================================================================
# Error Messages
# =============================================================================

ERROR_GENERIC = "Something went wrong. See the log for details."

ERROR_INVALID_SEED = "Invalid --seed: {detail}"

ERROR_INVALID_OUTPUT = "Invalid --out: {detail}"
