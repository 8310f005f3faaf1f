"""Shared numerical tolerances.

Kept in one place so numeric audits have a single knob to turn.
"""

# DF/RF identity, relative residual.
IDENTITY_TOL = 1e-10
# Slack allowed when comparing the analytic power ratio to a grid search.
OPTIMALITY_SLACK = 1e-12
# Closed form vs adaptive quadrature for the single-eavesdropper cell outage.
CELL_CLOSED_FORM_TOL = 1e-9
# Absolute error target for the 2-D eavesdropper-position quadrature.
CELL_QUADRATURE_TOL = 1e-6
# Relay positions closer than this to S, D or E are excluded from searches.
NODE_EXCLUSION_RADIUS = 1e-9
# Monte Carlo agreement is judged in units of the estimator's standard error.
MC_SIGMA_MULTIPLIER = 3.0
# Normal-approximation 95% quantile.
Z95 = 1.96
