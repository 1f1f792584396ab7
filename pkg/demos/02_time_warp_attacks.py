# %% [markdown]
# # Time-warp attacks
#
# An adversary mining in private can claim its chain took less (or more) time
# than it really did.  Squeezing time by a factor `phi` multiplies the recorded
# timed resources by `phi`; space is never inflated.

# %%
from pdsweight import (
    ResourcePoint,
    ResourceProfile,
    TimeWarp,
    adversarial_chain,
    chain_weight,
    parse,
    plan_attack,
    run_attack,
)

sq = parse("pow(W1, 2)")
honest = ResourceProfile.constant(ResourcePoint.of(W=2), 1)
adversary = ResourceProfile.constant(ResourcePoint.of(W=1), 1)
squeezed = adversarial_chain(adversary, TimeWarp.constant(8, 1))
print("honest:", chain_weight(sq, honest))
print("adversary, unwarped:", chain_weight(sq, adversary))
print("adversary, squeezed 8x:", chain_weight(sq, squeezed), "over", squeezed.horizon)

# %% [markdown]
# For any insecure function the library finds a witness and builds the
# matching attack: a squeeze, a stretch, or a stretch that trades equal weight
# for time.

# %%
for text in ["pow(W1, 2)", "W1 * W2", "pow(W1, 0.5)", "S1", "S1 + V1 * W1"]:
    e = parse(text)
    sc = plan_attack(e)
    out = run_attack(e, sc)
    print(f"{text:16s} case {sc.case_tag:5s} T0={sc.t0:<8.4g} "
          f"honest {out.honest_weight:.6g} vs adversary {out.adversarial_weight:.6g} "
          f"success={out.success}")

# %% [markdown]
# Homogeneous functions are immune: every warp leaves the weight unchanged.

# %%
import numpy as np
from pdsweight.resources import random_profile

rng = np.random.default_rng(0)
space_vdf = parse("S1 * V1")
prof = random_profile(rng, (1, 1, 0), 4.0, 5)
for phis in [(2.0,), (0.25,), (8.0, 0.5)]:
    cuts = (0.0,) if len(phis) == 1 else (0.0, 2.0)
    warped = adversarial_chain(prof, TimeWarp(4.0, cuts, phis))
    print(phis, chain_weight(space_vdf, prof), chain_weight(space_vdf, warped))
