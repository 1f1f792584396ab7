# %% [markdown]
# # Classifying weight functions
#
# A weight function maps what a block records (space `S`, VDF speed `V`,
# hash rate `W`) to a number; the heaviest chain wins.  Whether a private
# fork can ever beat the honest chain depends on two structural properties:
# monotonicity, and homogeneity in the timed resources `(V, W)`.  A third,
# subhomogeneity in `S`, matters once blocks record space as a snapshot.

# %%
from pdsweight import classify, parse

corpus = [
    "W1",
    "S1 * V1",
    "pow(W1, 0.5) * pow(W2, 0.5)",
    "min(W1, W2)",
    "0.5 * W1 + 0.5 * W2",
    "pow(W1, 2)",
    "W1 * W2",
    "S1",
    "pow(S1, 2) * V1",
    "S1 + V1 * W1",
]

for text in corpus:
    c = classify(parse(text))
    print(f"{text:32s} {c.verdict:18s} discrete-safe={c.discrete_sufficient}")

# %% [markdown]
# Insecure verdicts always come with a witness that can be replayed.

# %%
expr = parse("pow(W1, 2)")
wit = classify(expr).reports["homogeneous_timed"].witness
print("witness:", wit)
print("replayed defect:", wit.replay(expr))

# %% [markdown]
# `S^2 V` survives time warping but not the discrete model: doubling space
# more than doubles the weight.

# %%
rep = classify(parse("pow(S1, 2) * V1")).reports["subhomogeneous_space"]
print(rep.holds, rep.witness)
