"""Differential evolution over mixed parameter spaces with early termination.

Candidates mutate by extrapolating between three other population members:
continuous and integer dimensions move to a + f*(b - c) trimmed to range,
booleans negate, categoricals resample from the three donors.  Each member
is challenged by its mutant every generation; a generation that fails to
improve the best score costs one life, and the search stops when life runs
out.  Defaults follow np=10, f=0.75, cr=0.3, life=5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

CONTINUOUS = "continuous"
INTEGER = "integer"
CATEGORICAL = "categorical"
BOOLEAN = "boolean"

# Improvements smaller than this are float noise, not progress.
IMPROVEMENT_EPS = 1e-12
# Hard cap for pathological objectives that keep improving forever.
MAX_GENERATIONS = 200


@dataclass(frozen=True)
class ParamSpec:
    """One tunable dimension: its kind, legal range or values, and default."""

    name: str
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    values: tuple = ()
    default: Any = None

    def __post_init__(self):
        if self.kind in (CONTINUOUS, INTEGER):
            if not self.lo < self.hi:
                raise ValueError(f"{self.name}: need lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind == CATEGORICAL:
            if not self.values:
                raise ValueError(f"{self.name}: categorical needs a non-empty value list")
        elif self.kind != BOOLEAN:
            raise ValueError(f"{self.name}: unknown kind {self.kind!r}")

    def contains(self, value) -> bool:
        if self.kind == CONTINUOUS:
            return self.lo <= value <= self.hi
        if self.kind == INTEGER:
            return self.lo <= value <= self.hi and float(value).is_integer()
        if self.kind == BOOLEAN:
            return isinstance(value, (bool, np.bool_))
        return value in self.values

    def sample(self, rng: np.random.Generator):
        if self.kind == CONTINUOUS:
            return float(rng.uniform(self.lo, self.hi))
        if self.kind == INTEGER:
            return int(rng.integers(int(self.lo), int(self.hi) + 1))
        if self.kind == BOOLEAN:
            return bool(rng.integers(0, 2))
        return self.values[int(rng.integers(0, len(self.values)))]

    def trim(self, raw: float):
        if self.kind == CONTINUOUS:
            return float(min(max(raw, self.lo), self.hi))
        # Integers round half away from zero before trimming.
        rounded = math.floor(raw + 0.5) if raw >= 0 else math.ceil(raw - 0.5)
        return int(min(max(rounded, self.lo), self.hi))


@dataclass(frozen=True)
class ParamSpace:
    """Ordered, uniquely-named tuning dimensions."""

    specs: tuple[ParamSpec, ...]

    def __post_init__(self):
        names = [s.name for s in self.specs]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate dimension names: {names}")

    def __iter__(self):
        return iter(self.specs)

    def __len__(self):
        return len(self.specs)

    def __getitem__(self, name: str) -> ParamSpec:
        for spec in self.specs:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def defaults(self) -> dict[str, Any]:
        return {s.name: s.default for s in self.specs}

    def validate(self, tunings: dict[str, Any]) -> None:
        for name, value in tunings.items():
            spec = self[name]
            if not spec.contains(value):
                bounds = spec.values if spec.kind == CATEGORICAL else (spec.lo, spec.hi)
                raise ValueError(f"parameter {name}={value!r} outside legal range {bounds}")


@dataclass
class Candidate:
    """One point in the space plus its score, once evaluated."""

    tunings: dict[str, Any]
    score: float | None = None


@dataclass(frozen=True)
class DEConfig:
    np: int = 10
    f: float = 0.75
    cr: float = 0.3
    life: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.np < 4:
            raise ValueError("population needs at least 4 members (target plus three donors)")
        if self.f <= 0:
            raise ValueError("extrapolation factor f must be positive")
        if not 0 <= self.cr <= 1:
            raise ValueError("crossover probability cr must be in [0, 1]")
        if self.life < 1:
            raise ValueError("life must be at least 1")


def _sample_population(space: ParamSpace, n: int, rng: np.random.Generator) -> list[Candidate]:
    return [Candidate({s.name: s.sample(rng) for s in space}) for _ in range(n)]


def init_population(space: ParamSpace, cfg: DEConfig) -> list[Candidate]:
    """np candidates drawn uniformly per dimension, deterministically from the seed."""
    return _sample_population(space, cfg.np, np.random.default_rng(cfg.seed))


def extrapolate(target: Candidate, a: Candidate, b: Candidate, c: Candidate,
                space: ParamSpace, cfg: DEConfig, rng: np.random.Generator) -> Candidate:
    """Mutant of `target`: each dimension mutates with probability cr, else is kept.

    One uniformly chosen dimension always mutates (Storn-Price binomial
    crossover); without it, low cr on narrow spaces emits mostly clones of
    the target and the population stalls before it can converge.
    """
    if len({id(target), id(a), id(b), id(c)}) != 4:
        raise ValueError("target and donors a, b, c must be four distinct members")
    forced = int(rng.integers(0, len(space)))
    tunings = {}
    for k, spec in enumerate(space):
        name = spec.name
        if rng.random() >= cfg.cr and k != forced:
            tunings[name] = target.tunings[name]
        elif spec.kind == BOOLEAN:
            tunings[name] = not target.tunings[name]
        elif spec.kind == CATEGORICAL:
            donors = (a.tunings[name], b.tunings[name], c.tunings[name])
            tunings[name] = donors[int(rng.integers(0, 3))]
        else:
            raw = a.tunings[name] + cfg.f * (b.tunings[name] - c.tunings[name])
            tunings[name] = spec.trim(raw)
    return Candidate(tunings)


@dataclass
class DERun:
    """Everything a caller might audit about one optimisation run."""

    best: Candidate
    evaluations: int
    generations: int
    initial_scores: list[float]
    best_history: list[float] = field(default_factory=list)
    final_population: list[Candidate] = field(default_factory=list)
    # (generation, slot, incumbent score, challenger score, replaced)
    log: list[tuple[int, int, float, float, bool]] = field(default_factory=list)


def run_de(space: ParamSpace, objective: Callable[[Candidate], float], direction: str,
           cfg: DEConfig, seed_candidates: list[dict] | None = None) -> DERun:
    """Full DE loop returning the best candidate ever seen plus run accounting.

    `seed_candidates` are tunings planted at the front of the initial
    population (the harness uses slot 0 for the learner's defaults, which
    makes "tuning never loses to defaults on the tuning split" structural).
    """
    if direction not in ("minimize", "maximize"):
        raise ValueError(f"direction must be minimize or maximize, got {direction!r}")
    prefer = (lambda x, y: x < y) if direction == "minimize" else (lambda x, y: x > y)
    improved = (lambda x, y: x < y - IMPROVEMENT_EPS) if direction == "minimize" \
        else (lambda x, y: x > y + IMPROVEMENT_EPS)

    rng = np.random.default_rng(cfg.seed)
    population = _sample_population(space, cfg.np, rng)
    for i, tunings in enumerate(seed_candidates or []):
        space.validate(tunings)
        population[i] = Candidate(dict(tunings))

    evaluations = 0

    def scored(candidate: Candidate) -> Candidate:
        nonlocal evaluations
        candidate.score = float(objective(candidate))
        evaluations += 1
        return candidate

    for candidate in population:
        scored(candidate)

    best = min(population, key=lambda c: c.score) if direction == "minimize" \
        else max(population, key=lambda c: c.score)
    run = DERun(best=best, evaluations=0, generations=0,
                initial_scores=[c.score for c in population],
                best_history=[best.score])

    life = cfg.life
    generation = 0
    while life > 0 and generation < MAX_GENERATIONS:
        generation += 1
        next_population = []
        gained_ground = False
        for i, incumbent in enumerate(population):
            others = [j for j in range(cfg.np) if j != i]
            ai, bi, ci = rng.choice(others, size=3, replace=False)
            mutant = scored(extrapolate(incumbent, population[ai], population[bi],
                                        population[ci], space, cfg, rng))
            replaced = prefer(mutant.score, incumbent.score)
            gained_ground |= improved(mutant.score, incumbent.score)
            run.log.append((generation, i, incumbent.score, mutant.score, replaced))
            next_population.append(mutant if replaced else incumbent)
        population = next_population
        generation_best = min(population, key=lambda c: c.score) if direction == "minimize" \
            else max(population, key=lambda c: c.score)
        if prefer(generation_best.score, run.best.score):
            run.best = generation_best
        # A life is spent whenever the new population is no better than the
        # old one, i.e. no slot beat its incumbent beyond float noise.
        if not gained_ground:
            life -= 1
        run.best_history.append(run.best.score)

    run.evaluations = evaluations
    run.generations = generation
    run.final_population = population
    return run


def optimize(space: ParamSpace, objective: Callable[[Candidate], float], direction: str,
             cfg: DEConfig, seed_candidates: list[dict] | None = None) -> Candidate:
    """The best candidate found; see run_de for the full accounting."""
    return run_de(space, objective, direction, cfg, seed_candidates).best
