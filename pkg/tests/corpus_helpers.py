"""Shared randomized-instance generators and the golden triple corpus."""

import numpy as np

from coherent_age.copulas import ClaytonOakes, FGM, GumbelHougaard, Independence
from coherent_age.distributions import Exponential, LinearFailureRate, Weibull
from coherent_age.systems import Structure, SystemModel, k_of_n_paths


def random_structure(rng, n):
    for _ in range(20):
        count = int(rng.integers(1, 4))
        cand = set()
        for _ in range(count):
            size = int(rng.integers(1, n + 1))
            members = rng.choice(np.arange(1, n + 1), size=size, replace=False)
            cand.add(frozenset(int(i) for i in members))
        minimal = {a for a in cand if not any(b < a for b in cand)}
        if set().union(*minimal) == set(range(1, n + 1)):
            return Structure.from_paths(n, minimal)
    return Structure.series(n)


def random_copula(rng, n):
    kinds = ["independence", "gumbel", "clayton"] + (["fgm"] if n == 3 else [])
    kind = kinds[int(rng.integers(0, len(kinds)))]
    if kind == "independence":
        return Independence(n)
    if kind == "gumbel":
        return GumbelHougaard(theta=float(rng.uniform(1.0, 3.0)), dim=n)
    if kind == "clayton":
        return ClaytonOakes(theta=float(rng.uniform(0.3, 3.0)), dim=n)
    return FGM(theta=float(rng.uniform(-1.0, 1.0)))


def random_margin_pair(rng, relation):
    """Margin pairs biased so a decent share satisfies the order hypotheses."""
    roll = rng.random()
    if relation == "c_star":
        if roll < 0.4:
            alpha = float(rng.uniform(0.3, 2.0))
            beta = float(rng.uniform(0.0, 2.0))
            scale = float(rng.uniform(1.0, 3.0))
            return LinearFailureRate(alpha, beta), LinearFailureRate(alpha * scale, beta)
        if roll < 0.7:
            shape = float(rng.uniform(0.6, 3.0))
            lam = float(rng.uniform(0.5, 2.0))
            return Weibull(shape, lam), Weibull(shape, lam / float(rng.uniform(1.0, 2.5)))
    else:
        if roll < 0.7:
            rate = float(rng.uniform(0.5, 3.0))
            return Exponential(rate * float(rng.uniform(1.0, 3.0))), Exponential(rate)
    makers = [
        lambda: Exponential(float(rng.uniform(0.3, 3.0))),
        lambda: LinearFailureRate(float(rng.uniform(0.3, 3.0)), float(rng.uniform(0.0, 2.0))),
        lambda: Weibull(float(rng.uniform(0.6, 3.0)), float(rng.uniform(0.4, 2.5))),
    ]
    return makers[int(rng.integers(0, 3))](), makers[int(rng.integers(0, 3))]()


def random_instance(rng, relation):
    n1 = int(rng.integers(2, 5))
    n2 = int(rng.integers(2, 5))
    mx, my = random_margin_pair(rng, relation)
    sys1 = SystemModel(random_structure(rng, n1), random_copula(rng, n1), mx)
    sys2 = SystemModel(random_structure(rng, n2), random_copula(rng, n2), my)
    return sys1, sys2


def golden_corpus():
    """Twelve (structure, copula, margin) triples spanning all families,
    including the two fully worked setups."""
    pair_series = Structure.from_paths(3, [[1, 2], [1, 3]])
    bridge_ish = Structure.from_paths(4, [[1, 2], [3, 4], [1, 4]])
    return [
        ("fgm-pair-series", pair_series, FGM(1.0), LinearFailureRate(1.0, 1.0)),
        ("series3-indep", Structure.series(3), Independence(3), LinearFailureRate(2.0, 1.0)),
        ("gumbel-series4", Structure.series(4), GumbelHougaard(2.0, 4), Exponential(3.0)),
        ("gumbel-series2", Structure.series(2), GumbelHougaard(2.0, 2), Exponential(2.0)),
        ("parallel2-indep", Structure.parallel(2), Independence(2), Exponential(1.0)),
        ("two-of-three-indep", k_of_n_paths(2, 3), Independence(3), Weibull(2.0, 1.0)),
        ("fgm-two-of-three", k_of_n_paths(2, 3), FGM(-0.5), LinearFailureRate(1.0, 0.5)),
        ("clayton-series3", Structure.series(3), ClaytonOakes(1.0, 3), Exponential(2.0)),
        ("clayton-parallel3", Structure.parallel(3), ClaytonOakes(2.0, 3), Weibull(0.8, 2.0)),
        ("gumbel-two-of-three", k_of_n_paths(2, 3), GumbelHougaard(1.5, 3), Exponential(1.0)),
        ("bridge-indep", bridge_ish, Independence(4), LinearFailureRate(2.0, 1.0)),
        ("gumbel-two-of-four", k_of_n_paths(2, 4), GumbelHougaard(2.0, 4), Exponential(2.0)),
    ]
