"""
Rate-versus-distance and rate-versus-fidelity curves
====================================================

Produces the two standard planning curves for a SiV network under
scenario B hardware: how the optimal end-to-end rate decays with
distance, and what raising the delivered-fidelity target costs in
rate at a fixed 6000 km span.  Both reuse the exhaustive optimizer,
so every curve point is a full (mu, L0, F_t, h) optimum.
"""

from satqnet import (
    build_network_models,
    load_config,
    rate_fidelity_tradeoff,
    sweep_distance,
)

scenario_cfg, platform_cfg = load_config("B", "siv")
models = build_network_models(scenario_cfg, platform_cfg)
grid = scenario_cfg.grid_spec()

# optimal rate versus end-to-end distance
distances_m = [l * 1e3 for l in range(1000, 16001, 3000)]
print("    L km     R Hz        mu        L0 km   F_t    h km   hops")
for optimum in sweep_distance(models, distances_m, grid=grid):
    best = optimum.best
    if best is None:
        print(f"  {optimum.l_m / 1e3:6.0f}   infeasible everywhere")
        continue
    print(f"  {optimum.l_m / 1e3:6.0f}   {best.r_hz:9.3f}   {best.mu:.5f}"
          f"   {best.l0_m / 1e3:6.0f}   {best.f_t}   {best.h_m / 1e3:4.0f}"
          f"   {best.l_m / best.l0_m:4.0f}")

# the price of delivered fidelity at a fixed 6000 km span; the curve
# ends where the target exceeds the purification ceiling
print("\n    F_t      R Hz        mu        L0 km")
for entry in rate_fidelity_tradeoff(models, 6000e3, grid=grid):
    if entry.best is None:
        print(f"  {entry.f_t:.3f}   no feasible point")
        continue
    best = entry.best
    print(f"  {entry.f_t:.3f}   {best.r_hz:9.3f}   {best.mu:.5f}"
          f"   {best.l0_m / 1e3:6.0f}")
