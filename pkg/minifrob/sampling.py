import os
import random
from fractions import Fraction
from typing import Callable, List, Optional

SEED_ENV = "MINIFROB_SEED"
DEFAULT_SEED = 1729
MAX_HEIGHT = 97


def default_seed() -> int:
    """Seed from ``MINIFROB_SEED`` or the built-in default."""
    value = os.environ.get(SEED_ENV)
    if value is None or not value.strip():
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError as err:
        raise ValueError(f"{SEED_ENV} must be an integer, got {value!r}.") from err


def make_rng(seed: Optional[int] = None) -> random.Random:
    return random.Random(default_seed() if seed is None else seed)


def random_fraction(rng: random.Random, nonzero: bool = False) -> Fraction:
    """Rational with numerator and denominator bounded by 97."""
    while True:
        x = Fraction(rng.randint(-MAX_HEIGHT, MAX_HEIGHT), rng.randint(1, MAX_HEIGHT))
        if x or not nonzero:
            return x


def make_pts(rng: random.Random, N: int, dims: int) -> List[List[Fraction]]:
    """Generate N random rational points."""
    return [[random_fraction(rng) for _ in range(dims)] for _ in range(N)]


def accepted_points(
    rng: random.Random,
    N: int,
    dims: int,
    accept: Callable[[List[Fraction]], bool],
    max_tries: int = 1000,
) -> List[List[Fraction]]:
    """Draw N points, redrawing any rejected by `accept` (e.g. singular metric).

    Raises
    ------
        RuntimeError: if `max_tries` draws do not yield N accepted points

    """
    out: List[List[Fraction]] = []
    tries = 0
    while len(out) < N:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"Only {len(out)} of {N} random points were accepted.")
        pt = make_pts(rng, 1, dims)[0]
        if accept(pt):
            out.append(pt)
    return out
