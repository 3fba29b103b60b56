"""Check and invariant codes shared by the kernels and the engine.

The position of a name in these tuples is its code; the kernels report
counters and failure records by code.
"""

PAIR_CHECKS = (
    "parity",
    "identity",
    "lemma1",
    "lemma2",
    "chain",
    "theorem1",
    "eq14",
    "andrica",
    "brocard",
    "beyond_midpoint",
)
SQUARE_CHECKS = ("legendre", "oppermann")
ALL_CHECKS = PAIR_CHECKS + SQUARE_CHECKS
CHECK_CODE = {name: i for i, name in enumerate(ALL_CHECKS)}

# Implications that must hold whenever the kernels evaluate them. A nonzero
# count means a bug in this package, not a fact about primes.
INVARIANTS = (
    "identity_implies_parity",
    "identity_offset",
    "chain_equivalence",
    "theorem1_nonzero",
    "andrica_strict",
    "theorem1_implies_andrica",
    "legendre_local",
)
INVARIANT_CODE = {name: i for i, name in enumerate(INVARIANTS)}


def check_mask(checks) -> int:
    mask = 0
    for name in checks:
        mask |= 1 << CHECK_CODE[name]
    return mask
