# %% [markdown]
# # Replotting
#
# A proof-of-space farmer can re-initialize its storage under fresh keys in
# the middle of a block.  After `m` replots it appears to hold `(m+1)` times
# its real space, at the cost of `m * rho` time in which its VDF work does not
# count toward the block.

# %%
from pdsweight import (
    DifficultyBand,
    PinnedDifficulty,
    ReplotScenario,
    ResourcePoint,
    ResourceProfile,
    parse,
    replot_block,
    simulate_defended_race,
    simulate_replot_race,
)

space_vdf = parse("S1 * V1")
sc = ReplotScenario(
    space_vdf,
    ResourceProfile.constant(ResourcePoint.of(S=1.1, V=1.1), 6),
    ResourceProfile.constant(ResourcePoint.of(S=1, V=1), 6),
    replot_time=2.0,
)
for m in range(3):
    print(m, "replots -> block weight", space_vdf(replot_block(sc, m).recorded))

out = simulate_replot_race(sc)
print("undefended:", out.to_dict())

# %% [markdown]
# A difficulty band `D <= weight <= eta * D` caps what one block can claim.
# With `eta` below the replot time, replotting no longer pays.

# %%
for eta in (1.5, 10.0):
    out = simulate_defended_race(sc, DifficultyBand(1.21, eta))
    print(f"eta={eta}: honest {out.honest_weight:.4f} adversary {out.adversarial_weight:.4f} "
          f"-> {out.winner}  strategy {out.best_strategy}")

# %% [markdown]
# For factored weights, pinning the timed factor of every block to `D`
# removes the incentive without any cap on space.

# %%
out = simulate_defended_race(sc, PinnedDifficulty(1.21, parse("S1"), parse("V1")))
print(out.to_dict())
