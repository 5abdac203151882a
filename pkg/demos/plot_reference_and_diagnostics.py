"""
Reference solutions and convergence diagnostics
===============================================

For tiny problems ``reference_solve`` gives the l1-penalized log-det
optimum to high accuracy, with a checkable optimality certificate. This
script compares it with the SICE-EDAT estimate and prints the ratio
diagnostics that the convergence argument assumes are bounded.
"""

import numpy as np

from sice_edat import make_problem, objective_value, reference_solve, run_sice_edat
from sice_edat.baseline import subgradient_violation
from sice_edat.metrics import assumption_diagnostics

lam = 0.22
prob = make_problem("chain", 5, n=10, rng=3)

###############################################################################
# The reference optimum and its certificate.
ref = reference_solve(prob.s_hat, lam)
print("certificate violation:", subgradient_violation(ref, prob.s_hat, lam))

###############################################################################
# SICE-EDAT reaches a thresholding fixed point rather than the penalized
# optimum, so its objective is typically lower.
res = run_sice_edat(prob.s_hat)
print("f(reference) =", objective_value(ref, prob.s_hat, lam))
print("f(SICE-EDAT) =", objective_value(res.theta_hat, prob.s_hat, lam))
print(np.round(res.theta_hat, 3))

###############################################################################
# Assumption ratios along the run, measured against the true precision.
def report(rec, theta):
    if rec.k % 20 == 0:
        r = assumption_diagnostics(theta, prob.theta_star, prob.s_hat, k=rec.k)
        print(f"k={r.k:3d}  ratio1={r.ratio1:.3f}  ratio2={r.ratio2:.3f}  "
              f"ratio3={r.ratio3:.3f}")

run_sice_edat(prob.s_hat, callback=report)
