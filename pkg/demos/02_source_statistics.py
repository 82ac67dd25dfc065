"""
Photon-pair source statistics: gain, error rate, and the mu tradeoff
====================================================================

The down-conversion source emits a thermal-like distribution of pair
numbers.  Raising the mean pair number mu buys coincidence rate but
pays in multi-pair errors, so the entangled-state fidelity falls; this
script shows both sides of that tradeoff and the small-signal forms
used to reason about it.
"""

import numpy as np

from satqnet import ArmPair, SourceModel
from satqnet.photon_source import (
    asymptotic_gain,
    asymptotic_qber,
    initial_fidelity,
    overall_gain,
    pair_number_pmf,
    qber,
)

# the emission-number law at two brightness settings
print("pair-number probabilities")
print("   n     mu=0.01      mu=0.2")
for n in range(5):
    print(f"   {n}   {pair_number_pmf(0.01, n):.3e}   "
          f"{pair_number_pmf(0.2, n):.3e}")

# one symmetric downlink: both arms see the same transmission and the
# same background click probability
eta = 3.3e-3
y0 = 3.3e-9
arms = ArmPair.symmetric(eta, y0)

print("\n      mu        Q_mu         QBER      F_init")
for mu in np.geomspace(2e-4, 0.2, 7):
    src = SourceModel(mu=float(mu), f_hz=1e9, e_d=0.01, e_0=0.5)
    q = overall_gain(src, arms)
    e = qber(src, arms)
    print(f"  {mu:.2e}   {q:.3e}   {e:.4f}   {initial_fidelity(e):.4f}")

# in the faint regime the closed forms collapse to simple products:
# Q -> eta_A eta_B mu (1 + 3 mu / 2) and the error rate to its floor
print("\nsmall-signal comparison at eta = 1e-3, y0 = 0")
faint = ArmPair.symmetric(1e-3, 0.0)
print("      mu    exact Q      approx Q     exact QBER   approx QBER")
for mu in (1e-3, 1e-2, 5e-2):
    src = SourceModel(mu=mu, f_hz=1e9, e_d=0.01, e_0=0.5)
    q_exact = overall_gain(src, faint)
    q_approx = asymptotic_gain(mu, 1e-3, 1e-3)
    e_exact = qber(src, faint)
    e_approx = asymptotic_qber(mu, 0.01)
    print(f"  {mu:.0e}   {q_exact:.4e}   {q_approx:.4e}   "
          f"{e_exact:.6f}     {e_approx:.6f}")

# with no signal at all, the background dominates and the correlation
# washes out toward a coin flip
src = SourceModel(mu=2e-4, f_hz=1e9, e_d=0.01, e_0=0.5)
dark = ArmPair.symmetric(1e-9, 1e-3)
print(f"\nbackground-dominated QBER: {qber(src, dark):.4f} (approaches 0.5)")
