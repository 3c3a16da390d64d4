"""Enumeration guards.

Every exhaustive search in the package is bounded by a named guard so that a
desk-scale tool never silently turns into an overnight job.  Guards can be
raised (or lowered) via the environment variable ``AELFORGE_GUARD_OVERRIDE``,
a comma-separated list of ``name=value`` pairs, e.g.::

    AELFORGE_GUARD_OVERRIDE="sampler_subsets=100000000,bell_vertices=12"
"""

from __future__ import annotations

import os

DEFAULT_GUARDS = {
    # q**L vectors when enumerating a full ambient space of subspaces
    "subspace_vectors": 1 << 20,
    # largest vertex count whose set partitions are enumerated (Bell(10)=115975)
    "bell_vertices": 10,
    # q**k codewords materialized for a single linear code
    "codewords": 1 << 20,
    # codeword tuples visited by a property verifier
    "codeword_tuples": 10**7,
    # subsets Y scanned by the exhaustive sampler verifier
    "sampler_subsets": 10**7,
    # candidate generator matrices visited by an inner-code search
    "search_candidates": 1 << 20,
    # matrices A enumerated by containment checks
    "containment_matrices": 10**7,
    # Monte Carlo sample count used when an exhaustive scan is off the table
    "montecarlo_samples": 10**5,
}


class GuardExceeded(RuntimeError):
    """An enumeration would exceed its configured guard."""

    def __init__(self, guard: str, needed, limit) -> None:
        super().__init__(
            f"guard '{guard}' exceeded: needs {needed}, limit {limit} "
            f"(override via AELFORGE_GUARD_OVERRIDE)"
        )
        self.guard = guard
        self.needed = needed
        self.limit = limit


def _overrides() -> dict[str, int]:
    raw = os.environ.get("AELFORGE_GUARD_OVERRIDE", "")
    out: dict[str, int] = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, value = part.partition("=")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise ValueError(f"bad AELFORGE_GUARD_OVERRIDE entry: {part!r}") from None
    return out


def guard_limit(name: str) -> int:
    if name not in DEFAULT_GUARDS:
        raise KeyError(f"unknown guard {name!r}")
    return _overrides().get(name, DEFAULT_GUARDS[name])


def check_guard(name: str, needed) -> None:
    """Raise GuardExceeded if `needed` is over the configured limit."""
    limit = guard_limit(name)
    if needed > limit:
        raise GuardExceeded(name, needed, limit)
