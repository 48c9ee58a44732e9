"""Integer weight data for linear torus actions on products of spheres.

A rank-2 torus acts linearly on a product of N unit-quaternion spheres by

    (z, w) * q_i = z^{a_i} w^{k_i} u_i + z^{b_i} w^{l_i} v_i j ,

so the action is a list of integer quadruples (a_i, b_i, k_i, l_i).  The
action is effective iff gcd(all a,b) = gcd(all k,l) = 1, and free iff every
selection of one exponent pair per factor generates the full weight lattice
(gcd of the 2x2 minors is 1).  Circle actions on products of odd spheres
carry one weight per complex coordinate and the analogous one-weight-per-
factor selection criterion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .errors import FreenessViolation, InputFormatError, PreconditionError
from .exact import IntMatrix, gcd_all, unimodular_complement
from .quadforms import BinaryQuadraticForm

Row = tuple[int, int, int, int]


@dataclass(frozen=True)
class TorusActionS3:
    """Weight rows (a_i, b_i, k_i, l_i), one per sphere factor."""

    rows: tuple[Row, ...]

    def __post_init__(self):
        if len(self.rows) < 1:
            raise PreconditionError("need at least one sphere factor")
        clean = tuple(tuple(int(v) for v in row) for row in self.rows)
        if any(len(r) != 4 for r in clean):
            raise PreconditionError("each row must be a quadruple (a, b, k, l)")
        object.__setattr__(self, "rows", clean)

    @property
    def n_factors(self) -> int:
        return len(self.rows)

    def permuted(self, perm: Sequence[int]) -> "TorusActionS3":
        return TorusActionS3(tuple(self.rows[p] for p in perm))


@dataclass(frozen=True)
class CircleActionSpheres:
    """One weight vector per sphere factor; S^{2m-1} and S^{2m} carry m weights."""

    factors: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self):
        if not self.factors:
            raise PreconditionError("need at least one sphere factor")
        clean = []
        for dim, weights in self.factors:
            dim = int(dim)
            if dim < 2:
                raise PreconditionError(f"sphere dimension {dim} < 2")
            m = (dim + 1) // 2
            w = tuple(int(x) for x in weights)
            if len(w) != m:
                raise PreconditionError(
                    f"S^{dim} carries {m} weights, got {len(w)}"
                )
            clean.append((dim, w))
        object.__setattr__(self, "factors", tuple(clean))


@dataclass(frozen=True)
class NormalizationWitness:
    """Record of the moves applied: transformed_rows[i] = reparam(rows[perm[i]])."""

    permutation: tuple[int, ...]
    reparam: IntMatrix  # determinant-1 matrix [[m, n], [r, s]]


@dataclass(frozen=True)
class NormalizedActionS3:
    """Action brought to the form a1 != 0, k1 = 0, (b1, l1) != (0, 0), k2*l2 != 0."""

    action: TorusActionS3
    witness: NormalizationWitness

    def __post_init__(self):
        (a1, b1, k1, l1) = self.action.rows[0]
        (_, _, k2, l2) = self.action.rows[1]
        if a1 == 0 or k1 != 0 or (b1, l1) == (0, 0) or k2 * l2 == 0:
            raise PreconditionError("rows do not satisfy the normalized form")


# -- effectiveness and freeness ------------------------------------------------


def is_effective(act: TorusActionS3) -> bool:
    ab = [v for (a, b, _, _) in act.rows for v in (a, b)]
    kl = [v for (_, _, k, l) in act.rows for v in (k, l)]
    return gcd_all(ab) == 1 and gcd_all(kl) == 1


def _free_rows(rows: Sequence[Row]) -> bool:
    """Brute force over all 2^N selections of one exponent pair per factor."""
    pair_choices = []
    for a, b, k, l in rows:
        first = (a, k)
        second = (b, l)
        pair_choices.append((first,) if first == second else (first, second))
    n = len(pair_choices)
    for selection in product(*pair_choices):
        g = 0
        for i in range(n):
            ci, mi = selection[i]
            for j in range(i + 1, n):
                cj, mj = selection[j]
                g = math.gcd(g, ci * mj - cj * mi)
                if g == 1:
                    break
            if g == 1:
                break
        if g != 1:
            return False
    return True


def is_free(act: TorusActionS3) -> bool:
    """Freeness of the torus action via the gcd-of-minors criterion.

    A single factor has no minors at all, so the empty gcd convention
    (gcd {} = 0) correctly reports that a rank-2 torus cannot act freely
    on one sphere.
    """
    return _free_rows(act.rows)


def is_free_circle(act: CircleActionSpheres) -> bool:
    """Freeness of a linear circle action on a product of spheres.

    Every point contains at least one nonzero coordinate per factor, so the
    isotropy at a "most concentrated" point is the subgroup of roots of
    unity of order gcd(one weight per factor); the action is free iff every
    such selection has gcd 1.  An even-dimensional factor always has the
    fixed polar axis available, so it contributes no weight to selections
    (and a product of even spheres alone is never free).
    """
    odd_factors = [w for dim, w in act.factors if dim % 2 == 1]
    if not odd_factors:
        return False
    for selection in product(*odd_factors):
        if gcd_all(selection) != 1:
            return False
    return True


# -- model differentials -----------------------------------------------------------


def differential_rows(act: TorusActionS3) -> list[BinaryQuadraticForm]:
    """Quadratic form (a s1 + k s2)(b s1 + l s2) contributed by each factor."""
    return [
        BinaryQuadraticForm(a * b, a * l + b * k, k * l)
        for (a, b, k, l) in act.rows
    ]


def circle_euler_data(act: CircleActionSpheres) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(lambdas, alphas): product of weights per S^3 factor resp. S^5 factor.

    These are the Euler-class coefficients that drive the circle-quotient
    classifier; a zero product means the corresponding differential vanishes.
    """
    lambdas = []
    alphas = []
    for dim, weights in act.factors:
        if dim == 3:
            lambdas.append(weights[0] * weights[1])
        elif dim == 5:
            alphas.append(weights[0] * weights[1] * weights[2])
        else:
            raise PreconditionError(
                f"Euler data is defined for S^3/S^5 factors only, got S^{dim}"
            )
    return tuple(lambdas), tuple(alphas)


# -- normalization ------------------------------------------------------------------


def _transform_rows(rows: Sequence[Row], m: int, n: int, r: int, s: int) -> tuple[Row, ...]:
    """Rewrite exponents after reparametrizing the torus by [[m, n], [r, s]].

    With new coordinates (x, y) = (z^m w^n, z^r w^s), an old monomial
    z^a w^k becomes x^{a'} y^{k'} where (a, k) = a'(m, n) + k'(r, s); the
    inverse of a determinant-1 matrix gives (a', k') = (a s - k r, -a n + k m).
    """
    out = []
    for a, b, k, l in rows:
        out.append((a * s - k * r, b * s - l * r, -a * n + k * m, -b * n + l * m))
    return tuple(out)


def normalize(act: TorusActionS3) -> NormalizedActionS3:
    """Bring a free, effective action to the a1 != 0, k1 = 0, k2*l2 != 0 form.

    Steps: (i) swap the lowest-index factor with a_i*b_i != 0 into slot 1,
    (ii) reparametrize the torus so the first exponent pair becomes
    (gcd(a1, k1), 0), (iii) swap the lowest-index remaining factor with
    k_i*l_i != 0 into slot 2.  Each step exists for free actions; failure to
    find a qualifying factor certifies non-freeness.

    The returned witness carries the factor permutation and the
    determinant-1 reparametrization; the transformed action is re-checked to
    be effective and free, and its differential rows are checked to be the
    original ones up to the induced invertible substitution of (s1, s2).
    """
    if not is_effective(act):
        raise PreconditionError("normalize requires an effective action")
    if not is_free(act):
        raise PreconditionError("normalize requires a free action")
    rows = list(act.rows)
    n_factors = len(rows)
    perm = list(range(n_factors))

    slot1 = next((i for i, (a, b, _, _) in enumerate(rows) if a * b != 0), None)
    if slot1 is None:
        raise FreenessViolation(
            "no factor has a_i*b_i != 0; a free action always has one"
        )
    if slot1 != 0:
        rows[0], rows[slot1] = rows[slot1], rows[0]
        perm[0], perm[slot1] = perm[slot1], perm[0]

    a1, _, k1, _ = rows[0]
    d = math.gcd(a1, k1)
    reparam = unimodular_complement(a1 // d, k1 // d)
    (m, n), (r, s) = reparam.row(0), reparam.row(1)
    new_rows = list(_transform_rows(rows, m, n, r, s))
    assert new_rows[0][0] == d and new_rows[0][2] == 0

    slot2 = next(
        (i for i, (_, _, k, l) in enumerate(new_rows) if i >= 1 and k * l != 0),
        None,
    )
    if slot2 is None:
        raise FreenessViolation(
            "no remaining factor has k_i*l_i != 0 after reparametrization; "
            "a free action always has one"
        )
    if slot2 != 1:
        new_rows[1], new_rows[slot2] = new_rows[slot2], new_rows[1]
        perm[1], perm[slot2] = perm[slot2], perm[1]

    normalized = TorusActionS3(tuple(new_rows))
    witness = NormalizationWitness(tuple(perm), reparam)

    # postconditions: orbits unchanged means effectiveness/freeness survive,
    # and the relation pencil is carried by the substitution s -> M s
    if not is_effective(normalized) or not is_free(normalized):
        raise FreenessViolation("normalization destroyed effectiveness/freeness")
    old_forms = differential_rows(act)
    new_forms = differential_rows(normalized)
    for i, p in enumerate(perm):
        if new_forms[i].substituted(m, n, r, s) != old_forms[p]:
            raise FreenessViolation("normalization broke the differential pencil")
    return NormalizedActionS3(normalized, witness)


# -- file formats ------------------------------------------------------------------
#
# Torus action files and circle action files are JSON documents with integer
# entries; floats are rejected outright.
#
#     {"n_factors": 3, "rows": [{"a": 1, "b": 1, "k": 0, "l": 0}, ...]}
#     {"factors": [{"sphere_dim": 5, "weights": [1, 1, 1]}, ...]}


def _reject_float(value: str):
    raise InputFormatError(f"float literal {value!r} not accepted; integers only")


def _load_json(text: str) -> dict:
    try:
        return json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}")


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputFormatError(f"{where}: expected integer, got {value!r}")
    return value


def parse_action(text: str) -> TorusActionS3:
    doc = _load_json(text)
    if not isinstance(doc, dict) or "rows" not in doc:
        raise InputFormatError("action file must be an object with a 'rows' field")
    rows_field = doc["rows"]
    if not isinstance(rows_field, list) or not rows_field:
        raise InputFormatError("rows: expected a non-empty list")
    if "n_factors" in doc:
        n = _as_int(doc["n_factors"], "n_factors")
        if n != len(rows_field):
            raise InputFormatError(
                f"n_factors = {n} but {len(rows_field)} rows given"
            )
    rows = []
    for i, row in enumerate(rows_field):
        if not isinstance(row, dict):
            raise InputFormatError(f"rows[{i}]: expected an object with a,b,k,l")
        vals = []
        for key in ("a", "b", "k", "l"):
            if key not in row:
                raise InputFormatError(f"rows[{i}].{key}: missing")
            vals.append(_as_int(row[key], f"rows[{i}].{key}"))
        rows.append(tuple(vals))
    return TorusActionS3(tuple(rows))


def format_action(act: TorusActionS3) -> str:
    return json.dumps(
        {
            "n_factors": act.n_factors,
            "rows": [
                {"a": a, "b": b, "k": k, "l": l} for (a, b, k, l) in act.rows
            ],
        }
    )


def parse_circle_action(text: str) -> CircleActionSpheres:
    doc = _load_json(text)
    if not isinstance(doc, dict) or "factors" not in doc:
        raise InputFormatError("circle file must be an object with a 'factors' field")
    factors_field = doc["factors"]
    if not isinstance(factors_field, list) or not factors_field:
        raise InputFormatError("factors: expected a non-empty list")
    factors = []
    for i, f in enumerate(factors_field):
        if not isinstance(f, dict) or "sphere_dim" not in f or "weights" not in f:
            raise InputFormatError(
                f"factors[{i}]: expected an object with sphere_dim and weights"
            )
        dim = _as_int(f["sphere_dim"], f"factors[{i}].sphere_dim")
        if not isinstance(f["weights"], list):
            raise InputFormatError(f"factors[{i}].weights: expected a list")
        weights = tuple(
            _as_int(w, f"factors[{i}].weights[{j}]")
            for j, w in enumerate(f["weights"])
        )
        factors.append((dim, weights))
    try:
        return CircleActionSpheres(tuple(factors))
    except PreconditionError as exc:
        raise InputFormatError(str(exc))


def format_circle_action(act: CircleActionSpheres) -> str:
    return json.dumps(
        {
            "factors": [
                {"sphere_dim": dim, "weights": list(w)} for dim, w in act.factors
            ]
        }
    )
