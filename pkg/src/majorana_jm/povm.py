"""The parent POVM, its marginals, and sharpness accounting.

The dense effect oracle evaluates

    G(q, x) = 2^(-3n) (1 + sum_k sum_R q_R sum_S x_S det(O_{R,S}) gamma_S)

with q in {+-1}^n the computational outcomes and x in {+-1}^(2n) the sign
string equivalent to the sampled conjugation monomial.  Everything here is
dense and gated to small mode counts; estimation paths never materialize
these tables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from majorana_jm.algebra import (
    canonical_monomial,
    conjugation_sign,
    dense_matrix,
    indices_to_support,
)
from majorana_jm.matching import MeasurementEnsemble, diag_index_sets, scan_minors

__all__ = [
    "PARENT_ORACLE_LIMIT",
    "ParentPovmSpec",
    "SharpnessRow",
    "SharpnessTable",
    "PovmReport",
    "minor_terms",
    "parent_effect",
    "effect_table",
    "outcome_probabilities",
    "marginal_effect",
    "sharpness_table",
    "two_observable_correlation",
    "povm_validate",
    "parent_validate",
    "x_string_from_subset",
    "subset_from_x_string",
    "degree1_parent_effect",
    "degree1_marginal",
]

PARENT_ORACLE_LIMIT = 5


@dataclass(frozen=True)
class ParentPovmSpec:
    """A coverage-certified ensemble viewed as a randomized parent POVM."""

    ensemble: MeasurementEnsemble

    def __post_init__(self):
        if self.ensemble.coverage is None:
            raise ValueError("ensemble must carry a coverage certificate")

    @property
    def n_modes(self) -> int:
        return self.ensemble.n_modes

    @property
    def degree_k(self) -> int:
        return self.ensemble.degree_k

    @property
    def n_matrices(self) -> int:
        return self.ensemble.n_matrices


def x_string_from_subset(mask: int, n_modes: int) -> np.ndarray:
    """Sign string of conjugation by the monomial with support ``mask``."""
    signs = np.empty(2 * n_modes, dtype=np.int8)
    for j in range(2 * n_modes):
        signs[j] = conjugation_sign(mask, 1 << j)
    return signs


def subset_from_x_string(signs) -> int:
    """Inverse of :func:`x_string_from_subset` (unique support mask)."""
    neg = [j for j, s in enumerate(signs) if s < 0]
    if len(neg) % 2 == 0:
        mask = 0
        for j in neg:
            mask |= 1 << j
        return mask
    mask = (1 << len(signs)) - 1
    for j in neg:
        mask ^= 1 << j
    return mask


@lru_cache(maxsize=64)
def _diag_sets_cached(n_modes: int, half: int):
    return tuple(diag_index_sets(n_modes, half))


def minor_terms(o_arr: np.ndarray, n_modes: int):
    """All nonzero minors ``det(O_{R,S})`` over diagonal R and every even S.

    Returns a list of ``(R, S, value)`` with 1-based index tuples, for
    ``|R| = |S| = 2k`` and every ``k = 1..n``; results are cached per matrix.
    """
    key = (o_arr.tobytes(), n_modes)
    if key not in _TERMS_CACHE:
        terms = []
        for half in range(1, n_modes + 1):
            rows_sets = _diag_sets_cached(n_modes, half)
            cols_sets = list(
                itertools.combinations(range(1, 2 * n_modes + 1), 2 * half)
            )
            rows = np.array(rows_sets, dtype=np.int64) - 1
            cols = np.array(cols_sets, dtype=np.int64) - 1
            sub = o_arr[rows[:, None, :, None], cols[None, :, None, :]]
            dets = np.linalg.det(sub)
            for i, j in np.argwhere(np.abs(dets) > 1e-14):
                terms.append((rows_sets[i], cols_sets[j], float(dets[i, j])))
        _TERMS_CACHE[key] = terms
    return _TERMS_CACHE[key]


_TERMS_CACHE: dict = {}
_terms_for = minor_terms


def _check_oracle_gate(n_modes: int):
    if n_modes > PARENT_ORACLE_LIMIT:
        raise ValueError(
            f"dense parent oracle gated to n <= {PARENT_ORACLE_LIMIT}"
        )


def parent_effect(o_arr, q, conj_subset, n_modes: int) -> np.ndarray:
    """Dense effect ``G(q, X)`` for one outcome of the parent POVM.

    ``q`` holds the n computational outcomes (+-1), ``conj_subset`` is the
    sampled conjugation monomial as a 1-based index iterable or bitmask.
    """
    _check_oracle_gate(n_modes)
    arr = np.asarray(o_arr, dtype=float)
    mask = conj_subset if isinstance(conj_subset, int) else indices_to_support(
        conj_subset, n_modes
    )
    q = np.asarray(q, dtype=np.int64)
    dim = 2 ** n_modes
    acc = np.eye(dim, dtype=complex)
    for rows, cols, det in _terms_for(arr, n_modes):
        q_r = int(np.prod(q[[(v - 1) // 2 for v in rows[::2]]]))
        x_s = conjugation_sign(mask, indices_to_support(cols, n_modes))
        acc = acc + (q_r * x_s * det) * dense_matrix(canonical_monomial(n_modes, cols))
    return acc / 2 ** (3 * n_modes)


def _sign_grids(o_arr, n_modes):
    """Per-term outcome sign tables over the q-grid and the x-grid."""
    terms = _terms_for(np.asarray(o_arr, dtype=float), n_modes)
    n = n_modes
    q_grid = np.array(
        [[1 - 2 * ((idx >> j) & 1) for j in range(n)] for idx in range(2 ** n)],
        dtype=np.int64,
    )
    x_grid = np.array(
        [[1 - 2 * ((idx >> j) & 1) for j in range(2 * n)] for idx in range(4 ** n)],
        dtype=np.int64,
    )
    q_signs = np.empty((2 ** n, len(terms)), dtype=np.int64)
    x_signs = np.empty((4 ** n, len(terms)), dtype=np.int64)
    for m, (rows, cols, _) in enumerate(terms):
        modes = [(v - 1) // 2 for v in rows[::2]]
        q_signs[:, m] = np.prod(q_grid[:, modes], axis=1)
        x_signs[:, m] = np.prod(x_grid[:, [c - 1 for c in cols]], axis=1)
    return terms, q_grid, x_grid, q_signs, x_signs


def effect_table(o_arr, n_modes: int):
    """Every effect ``G(q, x)`` as a stacked array, plus the outcome grids.

    Outcome order: x-string index major, q index minor; grid rows use bit
    ``j`` of the index for entry ``j`` (+1 for bit 0).
    """
    if n_modes > 4:
        raise ValueError("full effect table gated to n <= 4 (2^(3n) entries)")
    terms, q_grid, x_grid, q_signs, x_signs = _sign_grids(o_arr, n_modes)
    weights = np.array([t[2] for t in terms])
    mats = np.stack(
        [dense_matrix(canonical_monomial(n_modes, cols)) for _, cols, _ in terms]
    )
    dim = 2 ** n_modes
    coeff = np.einsum("xm,qm->xqm", x_signs, q_signs).reshape(-1, len(terms))
    effects = np.tensordot(coeff * weights, mats, axes=(1, 0))
    effects += np.eye(dim)
    effects /= 2 ** (3 * n_modes)
    return (q_grid, x_grid), effects.reshape(len(x_grid), len(q_grid), dim, dim)


def outcome_probabilities(o_arr, state_density: np.ndarray, n_modes: int) -> np.ndarray:
    """Exact ``tr(G(q, x) rho)`` table, shape ``(4^n, 2^n)``."""
    _check_oracle_gate(n_modes)
    terms, q_grid, x_grid, q_signs, x_signs = _sign_grids(o_arr, n_modes)
    weights = np.array([t[2] for t in terms])
    traces = np.array(
        [
            np.real(np.trace(dense_matrix(canonical_monomial(n_modes, cols)) @ state_density))
            for _, cols, _ in terms
        ]
    )
    table = 1.0 + (x_signs * (weights * traces)) @ q_signs.T
    return table / 2 ** (3 * n_modes)


def marginal_effect(o_arr, rows, cols, outcome: int, n_modes: int) -> np.ndarray:
    """Post-processed marginal of the parent for observable ``cols`` via ``rows``.

    Performs the literal sum of ``G(q, x)`` over all outcomes mapped to
    ``outcome`` by ``sign(det(O_{R,S})) x_S q_R``; the grouped q/x sign sums
    keep the enumeration tractable.  Equals ``(1 + outcome*|det| gamma_S)/2``.
    """
    _check_oracle_gate(n_modes)
    arr = np.asarray(o_arr, dtype=float)
    rows = tuple(sorted(rows))
    cols = tuple(sorted(cols))
    if rows not in _diag_sets_cached(n_modes, len(rows) // 2):
        raise ValueError("rows must be a union of standard pairs")
    terms, q_grid, x_grid, q_signs, x_signs = _sign_grids(arr, n_modes)
    try:
        star = next(
            m for m, (r, c, _) in enumerate(terms) if r == rows and c == cols
        )
        tau = 1.0 if terms[star][2] > 0 else -1.0
    except StopIteration:
        star = None
        tau = 1.0  # zero minor: the post-processing map is a fair coin
    dim = 2 ** n_modes
    total = np.zeros((dim, dim), dtype=complex)
    count = 0
    q_star = (
        q_signs[:, star]
        if star is not None
        else np.prod(q_grid[:, [(v - 1) // 2 for v in rows[::2]]], axis=1)
    )
    x_star = (
        x_signs[:, star]
        if star is not None
        else np.prod(x_grid[:, [c - 1 for c in cols]], axis=1)
    )
    weights = np.array([t[2] for t in terms])
    mats = np.stack(
        [dense_matrix(canonical_monomial(n_modes, c)) for _, c, _ in terms]
    )
    for a in (1, -1):
        for b in (1, -1):
            if tau * a * b != outcome:
                continue
            sel_q = q_star == a
            sel_x = x_star == b
            count += int(sel_q.sum()) * int(sel_x.sum())
            sum_q = q_signs[sel_q].sum(axis=0)
            sum_x = x_signs[sel_x].sum(axis=0)
            coeffs = weights * sum_q * sum_x
            total += np.tensordot(coeffs, mats, axes=(0, 0))
    return (count * np.eye(dim) + total) / 2 ** (3 * n_modes)


@dataclass(frozen=True)
class SharpnessRow:
    subset: tuple[int, ...]
    r: int  # 1-based matrix index of the best minor
    rows: tuple[int, ...]
    eta_rs: float
    eta_s: float
    eta_effective: float  # eta_s / N, the worst-case randomization discount


class SharpnessTable:
    """Per-observable sharpness bookkeeping for an ensemble.

    ``rows`` carry the best (r, R) per observable of the ensemble's primary
    degree with the lexicographic tie-break; per-matrix assignments (best R
    and signed minor for every matrix separately) drive the estimators.
    Other even degrees are scanned lazily on first access, so mixed-degree
    Hamiltonians share one table.  ``eta_effective`` divides by the number
    of matrices; ``mean_sharpness`` gives the exact sharpness of the
    uniformly randomized parent, which is at least as large.
    """

    def __init__(self, ensemble: MeasurementEnsemble):
        self.n_modes = ensemble.n_modes
        self.degree_k = ensemble.degree_k
        self.n_matrices = ensemble.n_matrices
        self._arrays = ensemble.arrays()
        self._by_degree: dict[int, dict] = {}
        self._build(ensemble.degree_k)

    def _build(self, half: int):
        if half in self._by_degree:
            return self._by_degree[half]
        if not 1 <= half <= self.n_modes:
            raise ValueError(f"no degree-{2 * half} observables on {self.n_modes} modes")
        supports, row_sets, eta, r_idx, rows_idx = scan_minors(
            self._arrays, self.n_modes, half
        )
        supports = [tuple(s) for s in supports]
        n_s = len(supports)
        pm_eta = np.zeros((self.n_matrices, n_s))
        pm_det = np.zeros((self.n_matrices, n_s))
        pm_rows: list[list[tuple[int, ...] | None]] = []
        rows_arr = np.array(row_sets, dtype=np.int64) - 1
        cols_arr = np.array(supports, dtype=np.int64) - 1
        for r, arr in enumerate(self._arrays):
            sub = arr[rows_arr[:, None, :, None], cols_arr[None, :, None, :]]
            dets = np.linalg.det(sub)
            best = np.argmax(np.abs(np.round(dets, 12)), axis=0)
            vals = dets[best, np.arange(n_s)]
            pm_eta[r] = np.abs(vals)
            pm_det[r] = vals
            pm_rows.append(
                [
                    row_sets[int(b)] if abs(v) > 1e-12 else None
                    for b, v in zip(best, vals)
                ]
            )
        rows = []
        for i, s in enumerate(supports):
            r_best = int(r_idx[i])
            rows.append(
                SharpnessRow(
                    subset=s,
                    r=r_best + 1,
                    rows=row_sets[int(rows_idx[i])] if r_best >= 0 else (),
                    eta_rs=float(eta[i]),
                    eta_s=float(eta[i]),
                    eta_effective=float(eta[i]) / self.n_matrices,
                )
            )
        data = {
            "supports": supports,
            "index": {s: i for i, s in enumerate(supports)},
            "pm_eta": pm_eta,
            "pm_det": pm_det,
            "pm_rows": pm_rows,
            "rows": rows,
        }
        self._by_degree[half] = data
        return data

    def _locate(self, subset):
        key = tuple(sorted(subset))
        if len(key) % 2 or not key:
            raise KeyError(f"not an even-degree support: {key}")
        data = self._build(len(key) // 2)
        return data, data["index"][key]

    @property
    def supports(self) -> list[tuple[int, ...]]:
        return self._by_degree[self.degree_k]["supports"]

    @property
    def rows(self) -> list[SharpnessRow]:
        return self._by_degree[self.degree_k]["rows"]

    def row_for(self, subset) -> SharpnessRow:
        data, i = self._locate(subset)
        return data["rows"][i]

    def mean_sharpness(self, subset) -> float:
        """Sharpness of the uniformly randomized parent for this observable."""
        data, i = self._locate(subset)
        return float(data["pm_eta"][:, i].mean())

    def assignment(self, r: int, subset):
        """Best rows and signed minor of matrix ``r`` (1-based) for a subset."""
        data, i = self._locate(subset)
        return data["pm_rows"][r - 1][i], float(data["pm_det"][r - 1, i])

    @property
    def min_sharpness(self) -> float:
        return min(row.eta_s for row in self.rows)

    @property
    def min_mean_sharpness(self) -> float:
        return float(self._by_degree[self.degree_k]["pm_eta"].mean(axis=0).min())


def sharpness_table(spec: ParentPovmSpec | MeasurementEnsemble) -> SharpnessTable:
    ensemble = spec.ensemble if isinstance(spec, ParentPovmSpec) else spec
    return SharpnessTable(ensemble)


def two_observable_correlation(o_arr, first, second, n_modes: int) -> float:
    """Coefficient ``c`` with ``E[e_S e_S'] = c * tr(gamma_{S xor S'} rho)``.

    ``first`` and ``second`` are ``(R, S)`` assignments.  The coefficient is
    ``det(O_{R xor R', S xor S'}) / (tau tau')`` when the two symmetric
    differences have equal size and zero otherwise.
    """
    arr = np.asarray(o_arr, dtype=float)
    (r1, s1), (r2, s2) = first, second
    r1, s1, r2, s2 = map(lambda t: tuple(sorted(t)), (r1, s1, r2, s2))
    rd = tuple(sorted(set(r1) ^ set(r2)))
    sd = tuple(sorted(set(s1) ^ set(s2)))
    if len(rd) != len(sd):
        return 0.0
    from majorana_jm.gaussian import submatrix_det

    tau1 = submatrix_det(arr, r1, s1)
    tau2 = submatrix_det(arr, r2, s2)
    if tau1 == 0.0 or tau2 == 0.0:
        raise ValueError("assignments must have nonzero minors")
    cross = submatrix_det(arr, rd, sd)
    return float(cross / (math.copysign(1.0, tau1) * math.copysign(1.0, tau2)))


@dataclass(frozen=True)
class PovmReport:
    completeness_residual: float
    min_eigenvalue: float
    n_effects: int

    @property
    def valid(self) -> bool:
        return self.completeness_residual < 1e-10 and self.min_eigenvalue > -1e-10


def povm_validate(effects) -> PovmReport:
    """Completeness and positivity of an iterable of dense effects."""
    effects = [np.asarray(e) for e in effects]
    dim = effects[0].shape[0]
    total = sum(effects)
    residual = float(np.max(np.abs(total - np.eye(dim))))
    min_eig = min(float(np.linalg.eigvalsh(e)[0]) for e in effects)
    return PovmReport(residual, min_eig, len(effects))


def parent_validate(o_arr, n_modes: int, marginal_checks: int = 3, rng=None):
    """Full dense validation of one parent rotation.

    Checks the effect table for positivity and completeness, the partial
    marginals against the single-R form, and the post-processed binary
    marginals against ``(1 + e |det| gamma_S)/2``.  Returns a dict of worst
    residuals.
    """
    arr = np.asarray(o_arr, dtype=float)
    _, effects = effect_table(arr, n_modes)
    flat = effects.reshape(-1, 2 ** n_modes, 2 ** n_modes)
    report = povm_validate(flat)
    worst_marginal = 0.0
    rng = rng or np.random.default_rng(0)
    terms = _terms_for(arr, n_modes)
    candidates = [t for t in terms if abs(t[2]) > 1e-12] or terms
    for _ in range(marginal_checks):
        rows, cols, det = candidates[int(rng.integers(0, len(candidates)))]
        for e in (1, -1):
            marg = marginal_effect(arr, rows, cols, e, n_modes)
            target = (
                np.eye(2 ** n_modes)
                + e * abs(det) * dense_matrix(canonical_monomial(n_modes, cols))
            ) / 2.0
            worst_marginal = max(worst_marginal, float(np.max(np.abs(marg - target))))
    return {
        "completeness_residual": report.completeness_residual,
        "min_eigenvalue": report.min_eigenvalue,
        "marginal_residual": worst_marginal,
    }


def degree1_parent_effect(etas, outcomes) -> np.ndarray:
    """Closed-form biased parent for the 2n single generators.

    ``G(e) = 2^(-2n) (1 + sum_j e_j eta_j gamma_j)`` requires
    ``sum eta_j^2 <= 1`` for positivity.
    """
    etas = np.asarray(etas, dtype=float)
    outcomes = np.asarray(outcomes, dtype=np.int64)
    if etas.shape != outcomes.shape or etas.ndim != 1 or len(etas) % 2:
        raise ValueError("need matching 2n-vectors")
    n_modes = len(etas) // 2
    dim = 2 ** n_modes
    acc = np.eye(dim, dtype=complex)
    for j, (eta, e) in enumerate(zip(etas, outcomes), start=1):
        if eta != 0.0:
            acc = acc + (e * eta) * dense_matrix(canonical_monomial(n_modes, [j]))
    return acc / 4 ** n_modes


def degree1_marginal(etas, index: int, outcome: int) -> np.ndarray:
    """Marginal of the degree-1 parent: ``(1 + e eta_j gamma_j)/2``."""
    etas = np.asarray(etas, dtype=float)
    n_modes = len(etas) // 2
    dim = 2 ** n_modes
    g = dense_matrix(canonical_monomial(n_modes, [index]))
    return (np.eye(dim) + outcome * etas[index - 1] * g) / 2.0
