"""Verification campaigns over integer parameter grids.

A campaign iterates a grid of weight tuples (exhaustively, or by seeded
sampling), filters to effective then free actions, classifies every
survivor, and tallies the outcome.  A ClassificationViolation is data, not
an error: it is recorded with a reproducible witness and the campaign keeps
going, because a nonempty witness list is exactly the "theorem falsified"
signal the harness exists to detect.

Determinism contract: the grid is statically partitioned into contiguous
chunks, per-chunk tallies are merged by commutative addition, and witness
lists are sorted canonically, so identical grid specs (including the seed)
produce identical reports for any worker count.  Random mode draws from
Python's random.Random (MT19937), named in the report config.
"""

from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .actions import TorusActionS3, _free_rows
from .cdga import HomotopyProfile
from .classify import (
    T2_KINDS,
    classify_t2_quotient,
    enumerate_profiles,
    max_effective_rank,
)
from .errors import ClassificationViolation, PreconditionError

PRNG_NAME = "mt19937"  # random.Random; seeded with the 64-bit campaign seed


@dataclass(frozen=True)
class GridSpec:
    """Parameter grid: N weight rows with entries in [-B, B].

    mode is "exhaustive" (all (2B+1)^(4N) tuples in odometer order) or
    "random" (count tuples from an explicitly seeded generator).
    """

    n_factors: int
    coefficient_bound: int
    mode: str = "exhaustive"
    count: int | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.n_factors < 2:
            raise PreconditionError("grid needs n_factors >= 2")
        if self.coefficient_bound < 1:
            raise PreconditionError("grid needs coefficient_bound >= 1")
        if self.mode == "exhaustive":
            if self.count is not None or self.seed is not None:
                raise PreconditionError("exhaustive mode takes no count/seed")
        elif self.mode == "random":
            if not self.count or self.count < 1:
                raise PreconditionError("random mode needs a positive count")
            if self.seed is None or not 0 <= self.seed < 2 ** 64:
                raise PreconditionError("random mode needs an explicit 64-bit seed")
        else:
            raise PreconditionError(f"unknown sample mode {self.mode!r}")

    @property
    def tuple_count(self) -> int:
        if self.mode == "exhaustive":
            return (2 * self.coefficient_bound + 1) ** (4 * self.n_factors)
        return self.count

    def config_echo(self) -> dict:
        echo = {
            "n_factors": self.n_factors,
            "coefficient_bound": self.coefficient_bound,
            "mode": self.mode,
        }
        if self.mode == "random":
            echo["count"] = self.count
            echo["seed"] = self.seed
            echo["prng"] = PRNG_NAME
        return echo


@dataclass
class CampaignReport:
    totals: dict
    violation_witnesses: list
    wall_time: float
    config: dict
    epsilon_checks: dict = field(default_factory=dict)

    def __post_init__(self):
        kinds_sum = sum(self.totals.get("kinds", {}).values())
        assert self.totals.get("effective", 0) >= self.totals.get("free", 0) >= kinds_sum
        assert (len(self.violation_witnesses) == 0) == (
            self.totals.get("violations", 0) == 0
        )

    def to_record(self) -> dict:
        record = {
            "totals": self.totals,
            "violation_witnesses": self.violation_witnesses,
            "wall_time": self.wall_time,
            "config": self.config,
        }
        if self.epsilon_checks:
            record["epsilon_checks"] = self.epsilon_checks
        return record

    def comparable(self) -> dict:
        """Everything except wall time; must be identical across worker counts."""
        record = self.to_record()
        record.pop("wall_time")
        return record


def _classify_rows(rows, tally, witnesses):
    try:
        result = classify_t2_quotient(TorusActionS3(rows))
    except ClassificationViolation as exc:
        tally["violations"] += 1
        message = str(exc)
        witnesses.append(
            {
                "rows": [list(r) for r in rows],
                "error": message,
                "epsilon_related": "epsilon" in message,
            }
        )
        return
    tally["kinds"][result.kind] += 1
    if result.epsilon is not None:
        tally["epsilon_checked"] += 1


def _fresh_tally() -> dict:
    return {
        "tested": 0,
        "effective": 0,
        "free": 0,
        "violations": 0,
        "epsilon_checked": 0,
        "kinds": {kind: 0 for kind in T2_KINDS},
    }


def _scan_exhaustive(args) -> tuple[dict, list]:
    """Worker: classify every tuple with grid index in [lo, hi)."""
    n_factors, bound, lo, hi = args
    radix = 2 * bound + 1
    slots = 4 * n_factors
    gcd = math.gcd
    tally = _fresh_tally()
    witnesses: list = []

    # odometer over base-radix digits, least significant slot last
    digits = [0] * slots
    idx = lo
    for pos in range(slots - 1, -1, -1):
        idx, digits[pos] = divmod(idx, radix)
    vals = [d - bound for d in digits]

    for index in range(lo, hi):
        rows = tuple(tuple(vals[4 * i: 4 * i + 4]) for i in range(n_factors))
        tally["tested"] += 1
        g_ab = 0
        g_kl = 0
        for a, b, k, l in rows:
            g_ab = gcd(gcd(g_ab, a), b)
            g_kl = gcd(gcd(g_kl, k), l)
        if g_ab == 1 and g_kl == 1:
            tally["effective"] += 1
            if _free_rows(rows):
                tally["free"] += 1
                _classify_rows(rows, tally, witnesses)
        # advance odometer
        for pos in range(slots - 1, -1, -1):
            if digits[pos] + 1 < radix:
                digits[pos] += 1
                vals[pos] += 1
                break
            digits[pos] = 0
            vals[pos] = -bound
    return tally, witnesses


def _scan_tuples(args) -> tuple[dict, list]:
    """Worker: classify an explicit list of flat weight tuples."""
    n_factors, flat_tuples = args
    gcd = math.gcd
    tally = _fresh_tally()
    witnesses: list = []
    for flat in flat_tuples:
        rows = tuple(tuple(flat[4 * i: 4 * i + 4]) for i in range(n_factors))
        tally["tested"] += 1
        g_ab = 0
        g_kl = 0
        for a, b, k, l in rows:
            g_ab = gcd(gcd(g_ab, a), b)
            g_kl = gcd(gcd(g_kl, k), l)
        if g_ab == 1 and g_kl == 1:
            tally["effective"] += 1
            if _free_rows(rows):
                tally["free"] += 1
                _classify_rows(rows, tally, witnesses)
    return tally, witnesses


def resolve_jobs(jobs: int | None) -> int:
    """Requested worker count; the RT_JOBS environment variable overrides."""
    env = os.environ.get("RT_JOBS")
    if env is not None:
        try:
            jobs = int(env)
        except ValueError:
            raise PreconditionError(f"RT_JOBS={env!r} is not an integer")
    if jobs is None:
        jobs = 1
    if jobs < 1:
        raise PreconditionError("jobs must be >= 1")
    return jobs


def _merge(parts) -> tuple[dict, list]:
    tally = _fresh_tally()
    witnesses: list = []
    for part_tally, part_witnesses in parts:
        for key in ("tested", "effective", "free", "violations", "epsilon_checked"):
            tally[key] += part_tally[key]
        for kind in T2_KINDS:
            tally["kinds"][kind] += part_tally["kinds"][kind]
        witnesses.extend(part_witnesses)
    witnesses.sort(key=lambda w: w["rows"])
    return tally, witnesses


def run_t2_campaign(grid: GridSpec, jobs: int | None = None) -> CampaignReport:
    """Classify every effective, free action in the grid and tally the kinds."""
    jobs = resolve_jobs(jobs)
    start = time.monotonic()

    if grid.mode == "exhaustive":
        total = grid.tuple_count
        n_chunks = min(max(1, jobs * 4), total)
        bounds = [total * i // n_chunks for i in range(n_chunks + 1)]
        work = [
            (grid.n_factors, grid.coefficient_bound, bounds[i], bounds[i + 1])
            for i in range(n_chunks)
        ]
        worker = _scan_exhaustive
    else:
        rng = random.Random(grid.seed)
        slots = 4 * grid.n_factors
        b = grid.coefficient_bound
        tuples = [
            tuple(rng.randint(-b, b) for _ in range(slots))
            for _ in range(grid.count)
        ]
        n_chunks = min(max(1, jobs * 4), len(tuples))
        bounds = [len(tuples) * i // n_chunks for i in range(n_chunks + 1)]
        work = [
            (grid.n_factors, tuples[bounds[i]:bounds[i + 1]])
            for i in range(n_chunks)
        ]
        worker = _scan_tuples

    if jobs == 1:
        parts = [worker(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(worker, work))

    tally, witnesses = _merge(parts)
    epsilon_checks = {
        "checked": tally.pop("epsilon_checked"),
        "failures": sum(1 for w in witnesses if w["epsilon_related"]),
    }
    return CampaignReport(
        totals=tally,
        violation_witnesses=witnesses,
        wall_time=time.monotonic() - start,
        config=grid.config_echo(),
        epsilon_checks=epsilon_checks,
    )


# -- profile reproduction ------------------------------------------------------------


def expected_almost_free_profiles(n: int) -> list[HomotopyProfile]:
    """Closed-form admissible profiles at the maximal almost-free rank."""
    k = n // 3
    if n % 3 == 0:
        return [HomotopyProfile.from_dict(n, {3: k})]
    if n % 3 == 1:
        return []
    return [
        HomotopyProfile.from_dict(n, {3: k - 1, 5: 1}),
        HomotopyProfile.from_dict(n, {2: 1, 3: k + 1}),
    ]


def expected_effective_max_profiles(n: int) -> list[HomotopyProfile]:
    """The five-row table for n = 1 mod 3, truncated to nonnegative S^3 counts.

    Rows (d2, d4, d5, d7) with the forced d3, where s = (n + 2) / 3:
    (0,1,0,1) d3=s-2; (0,0,0,1) d3=s-3; (0,0,2,0) d3=s-4; (1,0,1,0) d3=s-2;
    (2,0,0,0) d3=s.
    """
    if n % 3 != 1:
        raise PreconditionError("the table applies to n = 1 mod 3")
    s = (n + 2) // 3
    raw = [
        ({4: 1, 7: 1}, s - 2),
        ({7: 1}, s - 3),
        ({5: 2}, s - 4),
        ({2: 1, 5: 1}, s - 2),
        ({2: 2}, s),
    ]
    out = []
    for pattern, d3 in raw:
        if d3 < 0:
            continue
        d = dict(pattern)
        if d3:
            d[3] = d3
        out.append(HomotopyProfile.from_dict(n, d))
    return out


def run_profile_campaign(n_max: int) -> CampaignReport:
    """Compare enumerate_profiles with the closed-form answers for 3 <= n <= n_max."""
    if n_max < 3:
        raise PreconditionError("n_max must be >= 3")
    start = time.monotonic()
    tested = 0
    witnesses = []
    for n in range(3, n_max + 1):
        tested += 1
        got = enumerate_profiles(n, max(n // 3, 1), "almost_free")
        expected = expected_almost_free_profiles(n)
        if set(got) != set(expected):
            witnesses.append(
                {
                    "rows": [n, "almost_free"],
                    "error": "profile mismatch",
                    "expected": [dict(p.d) for p in expected],
                    "got": [dict(p.d) for p in got],
                    "epsilon_related": False,
                }
            )
        if n % 3 == 1:
            tested += 1
            got = enumerate_profiles(n, max_effective_rank(n), "effective_max")
            expected = expected_effective_max_profiles(n)
            if set(got) != set(expected):
                witnesses.append(
                    {
                        "rows": [n, "effective_max"],
                        "error": "profile mismatch",
                        "expected": [dict(p.d) for p in expected],
                        "got": [dict(p.d) for p in got],
                        "epsilon_related": False,
                    }
                )
    totals = {"tested": tested, "violations": len(witnesses), "kinds": {}}
    return CampaignReport(
        totals=totals,
        violation_witnesses=witnesses,
        wall_time=time.monotonic() - start,
        config={"n_max": n_max, "mode": "profiles"},
    )
