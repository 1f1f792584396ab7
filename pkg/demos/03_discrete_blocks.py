# %% [markdown]
# # Discrete blocks
#
# Real chains record one space snapshot per block and the integrals of the
# timed resources.  Honest parties make unit blocks and report their minimum
# space; the adversary may choose any spans and report its maximum.  When both
# profiles fluctuate by at most a factor `xi` within a block and the honest
# side is `delta = xi^4` times heavier pointwise, the block weights keep the
# honest side ahead.

# %%
import numpy as np

from pdsweight import verify_theorem_chain
from pdsweight.discrete import adversarial_discretize, honest_discretize, random_smooth_profile
from pdsweight.resources import refine
from pdsweight import parse

rng = np.random.default_rng(1)
space_vdf = parse("S1 * V1")
xi = 1.18
delta = xi**4
honest = random_smooth_profile(rng, (1, 1, 0), 6.0, xi)
adversary = random_smooth_profile(rng, (1, 1, 0), 6.0, xi)
gap = min(space_vdf(h) / (delta * space_vdf(a)) for _, _, (h, a) in refine(honest, adversary))
adversary = adversary.map_values(lambda p: p.scale_timed(0.9 * gap))

rep = verify_theorem_chain(
    space_vdf, honest, adversary,
    honest_discretize(honest),
    adversarial_discretize(adversary, [(0, 2.5), (2.5, 4.0), (4.5, 6.0)]),
    delta, xi,
)
print(rep.to_dict())

# %% [markdown]
# A weight cubic in space is not subhomogeneous.  A short space spike inside a
# smooth block then breaks the last inequality even though every precondition
# holds.

# %%
from pdsweight import ResourcePoint, ResourceProfile

cubic = parse("pow(S1, 3) * V1")
honest = ResourceProfile.constant(ResourcePoint.of(S=1, V=200), 1)
spike = ResourceProfile.from_segments(
    [(0, ResourcePoint.of(S=1, V=1)), (0.99, ResourcePoint.of(S=2, V=1))], 1
)
rep = verify_theorem_chain(
    cubic, honest, spike, honest_discretize(honest), adversarial_discretize(spike, [(0, 1)]), 16.0
)
print("preconditions ok:", rep.preconditions_ok, "chain holds:", rep.holds)
print("adversary block", rep.adversary_block_weight, "> bound", rep.adversary_bound)
