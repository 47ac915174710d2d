"""Shot-level simulation of the joint measurement and unbiased estimators.

A shot samples a rotation index and a conjugation monomial, evolves the
state, and measures the n commuting pair observables by exact Born
probabilities.  Estimators post-process the recorded signs; variance for
the single-rotation setting follows the two-observable marginal formula.

Basis-outcome signs are always read off the dense observables, never
assumed (the pair observable maps to -Z under the chosen conventions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from majorana_jm.algebra import DENSE_LIMIT, canonical_monomial, dense_matrix
from majorana_jm.gaussian import compile_gaussian_unitary, submatrix_det
from majorana_jm.povm import (
    PARENT_ORACLE_LIMIT,
    ParentPovmSpec,
    SharpnessTable,
    sharpness_table,
    two_observable_correlation,
    x_string_from_subset,
)

__all__ = [
    "FermionicState",
    "ShotRecord",
    "ShotBatch",
    "HamiltonianSpec",
    "EstimationRecord",
    "UncoveredTargetError",
    "simulate_shots",
    "shot_probability_table",
    "estimate_expectations",
    "estimate_hamiltonian",
    "exact_expectations",
    "predicted_variance",
    "degree1_variance",
    "simulate_degree1_shots",
    "sample_complexity",
]


class UncoveredTargetError(ValueError):
    """An estimation target has zero sharpness under every rotation."""


@dataclass(frozen=True)
class FermionicState:
    """Pure vector or density matrix on n modes (2^n dimensions)."""

    n_modes: int
    vector: np.ndarray | None = None
    density_matrix: np.ndarray | None = None

    def __post_init__(self):
        dim = 2 ** self.n_modes
        if (self.vector is None) == (self.density_matrix is None):
            raise ValueError("give exactly one of vector or density_matrix")
        if self.vector is not None:
            vec = np.asarray(self.vector, dtype=complex).reshape(-1)
            if vec.shape != (dim,):
                raise ValueError("vector dimension mismatch")
            norm = np.linalg.norm(vec)
            if abs(norm - 1.0) > 1e-10:
                raise ValueError("state vector must be normalized")
            vec.setflags(write=False)
            object.__setattr__(self, "vector", vec)
        else:
            rho = np.asarray(self.density_matrix, dtype=complex)
            if rho.shape != (dim, dim):
                raise ValueError("density matrix dimension mismatch")
            if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
                raise ValueError("density matrix must be Hermitian")
            if abs(np.trace(rho) - 1.0) > 1e-10:
                raise ValueError("density matrix must have unit trace")
            if np.linalg.eigvalsh(rho)[0] < -1e-10:
                raise ValueError("density matrix must be positive semidefinite")
            rho.setflags(write=False)
            object.__setattr__(self, "density_matrix", rho)

    @property
    def is_pure(self) -> bool:
        return self.vector is not None

    def density(self) -> np.ndarray:
        if self.vector is not None:
            return np.outer(self.vector, self.vector.conj())
        return self.density_matrix

    def expectation(self, subset) -> float:
        g = dense_matrix(canonical_monomial(self.n_modes, subset))
        if self.vector is not None:
            return float(np.real(self.vector.conj() @ g @ self.vector))
        return float(np.real(np.trace(g @ self.density_matrix)))

    @classmethod
    def basis_state(cls, n_modes: int, index: int = 0) -> "FermionicState":
        vec = np.zeros(2 ** n_modes, dtype=complex)
        vec[index] = 1.0
        return cls(n_modes, vector=vec)

    @classmethod
    def maximally_mixed(cls, n_modes: int) -> "FermionicState":
        dim = 2 ** n_modes
        return cls(n_modes, density_matrix=np.eye(dim, dtype=complex) / dim)

    @classmethod
    def random_pure(cls, n_modes: int, rng) -> "FermionicState":
        dim = 2 ** n_modes
        vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return cls(n_modes, vector=vec / np.linalg.norm(vec))


@dataclass(frozen=True)
class ShotRecord:
    shot_id: int
    r: int  # 1-based rotation index
    conj_mask: int  # support of the sampled conjugation monomial
    q: tuple[int, ...]  # basis outcomes, +-1 per mode


@dataclass
class ShotBatch:
    """Columnar shot storage; records() iterates row views."""

    n_modes: int
    r: np.ndarray  # (L,) 1-based
    conj_mask: np.ndarray  # (L,) uint64
    q: np.ndarray  # (L, n) int8
    seed: int | None = None

    def __len__(self) -> int:
        return len(self.r)

    def records(self):
        for i in range(len(self.r)):
            yield ShotRecord(
                i, int(self.r[i]), int(self.conj_mask[i]), tuple(int(v) for v in self.q[i])
            )

    def x_strings(self) -> np.ndarray:
        """Sign-string view of the conjugation outcomes, shape (L, 2n)."""
        return np.stack(
            [x_string_from_subset(int(m), self.n_modes) for m in self.conj_mask]
        )


def _pair_sign_table(n_modes: int) -> np.ndarray:
    """diag of the n pair observables on the computational basis, (n, 2^n)."""
    table = np.empty((n_modes, 2 ** n_modes), dtype=np.int8)
    for j in range(n_modes):
        g = dense_matrix(canonical_monomial(n_modes, [2 * j + 1, 2 * j + 2]))
        table[j] = np.rint(np.real(np.diag(g))).astype(np.int8)
    return table


def _group_probability(o_unitary, state, conj_mask, n_modes):
    gx = dense_matrix(
        canonical_monomial(
            n_modes, [j + 1 for j in range(2 * n_modes) if (conj_mask >> j) & 1]
        )
    )
    if state.is_pure:
        vec = o_unitary @ (gx @ state.vector)
        probs = np.abs(vec) ** 2
    else:
        evolved = o_unitary @ gx @ state.density_matrix @ gx.conj().T @ o_unitary.conj().T
        probs = np.real(np.diag(evolved))
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def simulate_shots(
    state: FermionicState, parent: ParentPovmSpec, n_shots: int, rng, seed: int | None = None
) -> ShotBatch:
    """Sample shots of the randomized parent measurement.

    Rotation indices and conjugation monomials are drawn uniformly up
    front; shots are then grouped by (rotation, monomial) so each group
    samples its computational outcomes from one Born distribution.
    """
    n = state.n_modes
    if n != parent.n_modes:
        raise ValueError("state and ensemble mode counts differ")
    if n > DENSE_LIMIT:
        raise ValueError("dense simulation gated by the dense limit")
    n_mat = parent.n_matrices
    rs = rng.integers(0, n_mat, size=n_shots)
    masks = rng.integers(0, 2 ** (2 * n), size=n_shots, dtype=np.uint64)
    q_out = np.empty((n_shots, n), dtype=np.int8)
    sign_table = _pair_sign_table(n)
    unitaries = [compile_gaussian_unitary(m.entries, n) for m in parent.ensemble.matrices]
    keys = rs.astype(np.uint64) << np.uint64(2 * n + 1) | masks
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    boundaries = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])
    dim = 2 ** n
    for g, start in enumerate(boundaries):
        stop = boundaries[g + 1] if g + 1 < len(boundaries) else n_shots
        members = order[start:stop]
        r = int(rs[members[0]])
        mask = int(masks[members[0]])
        probs = _group_probability(unitaries[r], state, mask, n)
        basis = rng.choice(dim, size=len(members), p=probs)
        q_out[members] = sign_table[:, basis].T
    return ShotBatch(n, rs + 1, masks, q_out, seed=seed)


def shot_probability_table(state: FermionicState, parent: ParentPovmSpec):
    """Exact joint distribution over (rotation, monomial mask, q-index).

    Oracle for distribution tests; gated to the dense-parent regime.
    """
    from majorana_jm.povm import outcome_probabilities

    n = state.n_modes
    if n > PARENT_ORACLE_LIMIT:
        raise ValueError("oracle gated to small n")
    rho = state.density()
    n_mat = parent.n_matrices
    table = np.empty((n_mat, 4 ** n, 2 ** n))
    # the x-string table is indexed by sign-string bits; re-key it by mask
    for r, mat in enumerate(parent.ensemble.matrices):
        by_x = outcome_probabilities(mat.entries, rho, n)
        for mask in range(4 ** n):
            signs = x_string_from_subset(mask, n)
            x_idx = 0
            for j, s in enumerate(signs):
                if s < 0:
                    x_idx |= 1 << j
            table[r, mask] = by_x[x_idx]
    return table / n_mat


def _target_signs(batch: ShotBatch, table: SharpnessTable, subset):
    """Per-shot post-processed signs for one target, NaN where uncovered."""
    n = batch.n_modes
    s_mask = 0
    for v in subset:
        s_mask |= 1 << (v - 1)
    size = len(tuple(subset))
    pop_x = np.bitwise_count(batch.conj_mask)
    pop_int = np.bitwise_count(batch.conj_mask & np.uint64(s_mask))
    x_sign = 1 - 2 * ((size * pop_x - pop_int) % 2).astype(np.int64)
    out = np.full(len(batch.r), np.nan)
    for r in range(1, table.n_matrices + 1):
        rows, det = table.assignment(r, subset)
        members = batch.r == r
        if not members.any():
            continue
        if rows is None:
            continue  # uncovered under this rotation: filled by a coin later
        modes = [(v - 1) // 2 for v in rows[::2]]
        q_r = batch.q[members][:, modes].prod(axis=1)
        out[members] = math.copysign(1.0, det) * x_sign[members] * q_r
    return out


@dataclass(frozen=True)
class EstimationRecord:
    target: object
    estimate: float
    shots: int
    stderr: float
    predicted_variance: float | None = None

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("standard error must be nonnegative")


def _effective_sharpness(table: SharpnessTable, subset) -> float:
    eta = table.mean_sharpness(subset)
    if eta <= 0.0:
        raise UncoveredTargetError(f"target {tuple(subset)} is uncovered")
    return eta


def estimate_expectations(
    batch: ShotBatch, table: SharpnessTable, targets, rng=None
) -> list[EstimationRecord]:
    """Unbiased estimates of ``tr(gamma_S rho)`` for each target.

    Shots whose rotation does not cover a target contribute a fair coin
    from ``rng``; the mean is divided by the exact effective sharpness of
    the randomized parent, so the estimator stays unbiased.
    """
    rng = rng or np.random.default_rng(0)
    records = []
    for subset in targets:
        eta = _effective_sharpness(table, subset)
        signs = _target_signs(batch, table, subset)
        holes = np.isnan(signs)
        if holes.any():
            signs[holes] = rng.choice((-1.0, 1.0), size=int(holes.sum()))
        est = float(signs.mean() / eta)
        stderr = float(signs.std(ddof=1) / math.sqrt(len(signs)) / eta)
        records.append(EstimationRecord(tuple(subset), est, len(signs), stderr))
    return records


@dataclass(frozen=True)
class HamiltonianSpec:
    """Real combination of even-degree observables."""

    terms: tuple[tuple[tuple[int, ...], float], ...]

    def __post_init__(self):
        seen = set()
        normalized = []
        for subset, coeff in self.terms:
            key = tuple(sorted(subset))
            if len(key) % 2:
                raise ValueError("only even-degree terms are allowed")
            if key in seen:
                raise ValueError(f"duplicate term {key}")
            seen.add(key)
            normalized.append((key, float(coeff)))
        object.__setattr__(self, "terms", tuple(normalized))

    def expectation(self, state: FermionicState) -> float:
        return sum(c * state.expectation(s) for s, c in self.terms)


def estimate_hamiltonian(
    batch: ShotBatch, table: SharpnessTable, ham: HamiltonianSpec, rng=None
) -> EstimationRecord:
    """Single-shot energy estimator averaged over the batch."""
    rng = rng or np.random.default_rng(0)
    per_shot = np.zeros(len(batch.r))
    for subset, coeff in ham.terms:
        eta = _effective_sharpness(table, subset)
        signs = _target_signs(batch, table, subset)
        holes = np.isnan(signs)
        if holes.any():
            signs[holes] = rng.choice((-1.0, 1.0), size=int(holes.sum()))
        per_shot += coeff * signs / eta
    est = float(per_shot.mean())
    stderr = float(per_shot.std(ddof=1) / math.sqrt(len(per_shot)))
    return EstimationRecord("hamiltonian", est, len(per_shot), stderr)


def exact_expectations(
    state: FermionicState, parent: ParentPovmSpec, targets
) -> list[EstimationRecord]:
    """Analytic estimator expectations from the dense parent (no sampling).

    Enumerates every outcome of every rotation, so it doubles as an
    unbiasedness oracle: the result equals ``tr(gamma_S rho)`` exactly for
    covered targets.
    """
    n = state.n_modes
    table = sharpness_table(parent.ensemble)
    probs = shot_probability_table(state, parent)
    n_mat = parent.n_matrices
    records = []
    for subset in targets:
        eta = _effective_sharpness(table, subset)
        s_mask = 0
        for v in subset:
            s_mask |= 1 << (v - 1)
        size = len(tuple(subset))
        total = 0.0
        for r in range(1, n_mat + 1):
            rows, det = table.assignment(r, subset)
            if rows is None:
                continue  # coin: zero mean
            tau = math.copysign(1.0, det)
            modes = [(v - 1) // 2 for v in rows[::2]]
            for mask in range(4 ** n):
                x_s = 1 - 2 * ((size * int(mask).bit_count() - int(mask & s_mask).bit_count()) % 2)
                for q_idx in range(2 ** n):
                    q_r = 1
                    for m in modes:
                        q_r *= 1 - 2 * ((q_idx >> m) & 1)
                    total += probs[r - 1, mask, q_idx] * tau * x_s * q_r
        records.append(EstimationRecord(tuple(subset), float(total / eta), 0, 0.0))
    return records


def predicted_variance(
    ham: HamiltonianSpec,
    o_arr,
    state: FermionicState,
    assignment: dict | None = None,
) -> float:
    """Variance of the single-rotation energy estimator.

    Requires the fixed single-rotation, fixed-R(S) setting; the cross terms
    couple through the two-observable marginal coefficient.
    """
    arr = np.asarray(o_arr, dtype=float)
    n = state.n_modes
    if assignment is None:
        from majorana_jm.matching import custom_ensemble

        pairs = {}
        for subset, _ in ham.terms:
            half = len(subset) // 2
            tab = sharpness_table(custom_ensemble(n, half, [arr]))
            rows, det = tab.assignment(1, subset)
            if rows is None:
                raise UncoveredTargetError(f"term {subset} has zero sharpness")
            pairs[subset] = rows
        assignment = pairs
    total = 0.0
    for subset, coeff in ham.terms:
        nu = submatrix_det(arr, assignment[subset], subset)
        if nu == 0.0:
            raise UncoveredTargetError(f"term {subset} has zero sharpness")
        total += coeff ** 2 / nu ** 2
    for (s1, c1) in ham.terms:
        for (s2, c2) in ham.terms:
            if s1 == s2:
                continue
            r1, r2 = assignment[s1], assignment[s2]
            # E[e_S e_S'] = coeff * tr(gamma_{S xor S'} rho); dividing by the
            # sharpness product turns it into the nu-ratio of the variance law
            coeff = two_observable_correlation(arr, (r1, s1), (r2, s2), n)
            if coeff == 0.0:
                continue
            eta1 = abs(submatrix_det(arr, r1, s1))
            eta2 = abs(submatrix_det(arr, r2, s2))
            sd = tuple(sorted(set(s1) ^ set(s2)))
            total += c1 * c2 * coeff * state.expectation(sd) / (eta1 * eta2)
    return total - ham.expectation(state) ** 2


def degree1_variance(coeffs, state: FermionicState) -> float:
    """Variance of the optimal uniform degree-1 estimator: 2n sum a^2 - tr^2."""
    coeffs = np.asarray(coeffs, dtype=float)
    n2 = len(coeffs)
    mean = sum(
        c * state.expectation([j + 1]) for j, c in enumerate(coeffs) if c != 0.0
    )
    return float(n2 * np.sum(coeffs ** 2) - mean ** 2)


def simulate_degree1_shots(state: FermionicState, n_shots: int, rng):
    """Shots of the optimal uniform degree-1 parent.

    Rotates the first generator onto ``sum_j gamma_j / sqrt(2n)``, conjugates
    by a uniform monomial and measures the single binary outcome; returns
    the per-shot sign strings ``e_j = q * x_j`` as an (L, 2n) array.
    """
    n = state.n_modes
    two_n = 2 * n
    eta = 1.0 / math.sqrt(two_n)
    target = np.full(two_n, eta)
    basis = np.linalg.qr(
        np.column_stack([target, np.eye(two_n)[:, 1:]])
    )[0]
    o = basis.T.copy()
    if o[0, 0] * target[0] < 0:
        o[0] = -o[0]
    u = compile_gaussian_unitary(o, n)
    g1 = dense_matrix(canonical_monomial(n, [1]))
    rotated = u.conj().T @ g1 @ u
    rho = state.density()
    masks = rng.integers(0, 2 ** two_n, size=n_shots, dtype=np.uint64)
    out = np.empty((n_shots, two_n), dtype=np.int8)
    means = {}
    for i, mask in enumerate(masks):
        key = int(mask)
        if key not in means:
            gx = dense_matrix(
                canonical_monomial(n, [j + 1 for j in range(two_n) if (key >> j) & 1])
            )
            gamma_ox = gx.conj().T @ rotated @ gx
            means[key] = float(np.real(np.trace(gamma_ox @ rho)))
        p_plus = (1.0 + means[key]) / 2.0
        q = 1 if rng.random() < p_plus else -1
        out[i] = q * x_string_from_subset(key, n)
    return out


def sample_complexity(
    n_modes: int, half_degree: int, epsilon: float, delta: float, eta: float
) -> int:
    """Shots guaranteeing epsilon-accurate estimates for all degree-2k targets.

    Hoeffding with a union bound over the C(2n, 2k) observables:
    ``ceil(2 ln(2 C(2n,2k) / delta) / (epsilon * eta)^2)``.
    """
    if not 0 < epsilon < 1 or not 0 < delta <= 1:
        raise ValueError("epsilon in (0,1), delta in (0,1]")
    if not 0 < eta <= 1:
        raise ValueError("eta in (0,1]")
    count = math.comb(2 * n_modes, 2 * half_degree)
    return math.ceil(2.0 * math.log(2.0 * count / delta) / (epsilon * eta) ** 2)
