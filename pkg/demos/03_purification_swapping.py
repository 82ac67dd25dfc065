"""
Purification fixed points, swapping losses, and the resource exponent
=====================================================================

Every memory platform defines a window of workable fidelities: below
the lower fixed point F_l purification makes states worse, and gate
noise caps the reachable ceiling F_max.  Entanglement swapping pushes
fidelity down, purification pulls it back up at a resource cost that
compounds per nesting level into the scaling exponent lambda.
"""

from satqnet import platform_preset, purify, swap
from satqnet.repeater_protocol import (
    lower_fixed_point,
    nesting_level_cost,
    plan_initial_stage,
    upper_fixed_point,
)

platforms = {name: platform_preset(name).platform_params()
             for name in ("siv", "nv", "atoms")}

# the workable fidelity window per platform
print("platform      F_l        F_max")
for name, params in platforms.items():
    print(f"  {name:<8} {lower_fixed_point(params):.6f}   "
          f"{upper_fixed_point(params):.6f}")

# pumping a mediocre SiV pair: each round trades acceptance for fidelity
siv = platforms["siv"]
print("\npurification trajectory from F = 0.60 (siv)")
fidelity = 0.60
for round_index in range(1, 7):
    fidelity, acceptance = purify(fidelity, siv)
    print(f"  round {round_index}: F = {fidelity:.6f}, "
          f"acceptance = {acceptance:.4f}")

# swapping always degrades; readout errors make it worse
print("\nswap output versus input fidelity (siv readout)")
for f in (0.99, 0.95, 0.90, 0.80):
    print(f"  F = {f:.2f} -> {swap(f, siv.eta_ro):.6f}")

# one nesting level: swap from the target, purify back, tally the cost;
# lambda is not monotone in the target because higher targets purify in
# a region of better per-round acceptance
print("\ntarget    rounds k   lambda (siv)")
for f_t in (0.90, 0.93, 0.95, 0.97, 0.99):
    k_level, lam = nesting_level_cost(f_t, siv)
    print(f"  {f_t:.2f}   {k_level:8d}   {lam:.4f}")

# before nesting starts, the raw downlink state must meet the target:
# purify up when it is short, swap down and re-purify when it exceeds
print("\ninitial stage from F_init = 0.9778 to F_t = 0.95 (siv)")
plan = plan_initial_stage(0.9777749963883561, 0.95, siv)
print(f"  extra swaps s = {plan.s}, rounds m = {plan.m}, "
      f"mean acceptance = {plan.p_tilde:.4f}, "
      f"delivered F = {plan.f_reached:.6f}")
