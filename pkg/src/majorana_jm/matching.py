"""Turan-graph partitions, sparse perfect matchings, and measurement ensembles.

The degree-2 ensemble consists of two orthogonal matrices ``O1 = P_pi D``
and ``O2 = O1 P_sigma`` where ``D`` is a direct sum of lower-flat blocks,
``pi`` reorders a sparsely arranged perfect matching onto the standard
pairs ``{2j-1, 2j}``, and ``sigma`` swaps the endpoints of every matching
edge.  The degree-2k ensemble permutes the columns of ``O1`` by uniformly
random permutations and retries until every size-2k support is covered.

Mode counts that miss the exact Turan size ``2n = l(l+1)`` are handled by
enlarging some blocks by two vertices; the two extra vertices of an
enlarged block are matched to each other and their within-block pair is
covered through a non-monomial 2x2 minor forced by orthogonality.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from majorana_jm.gaussian import LowerFlatMatrix, OrthogonalMatrix, lower_flat

__all__ = [
    "TuranPartition",
    "PerfectMatching",
    "MeasurementEnsemble",
    "CoverageRow",
    "CoverageReport",
    "CoverageError",
    "COVERAGE_TOL",
    "turan_side",
    "build_partition",
    "sparse_matching",
    "general_matching",
    "pi_permutation",
    "sigma_permutation",
    "permutation_matrix",
    "permutation_cycles",
    "diag_index_sets",
    "degree2_ensemble",
    "degree2k_ensemble",
    "custom_ensemble",
    "ensemble_coverage",
    "scan_minors",
    "partition_failure_prob",
    "random_partition",
    "random_partition_batch",
    "is_generated",
]

COVERAGE_TOL = 1e-12


class CoverageError(RuntimeError):
    """Raised when an ensemble fails its coverage certificate."""


@dataclass(frozen=True)
class TuranPartition:
    """Partition of ``{1..2n}`` into ``l+1`` contiguous subsets."""

    n_vertices: int
    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        flat = [v for sub in self.subsets for v in sub]
        if sorted(flat) != list(range(1, self.n_vertices + 1)):
            raise ValueError("subsets must partition {1..2n}")

    @property
    def n_subsets(self) -> int:
        return len(self.subsets)

    def color_of(self) -> dict[int, int]:
        """vertex -> subset index (0-based)."""
        return {v: i for i, sub in enumerate(self.subsets) for v in sub}


@dataclass(frozen=True)
class PerfectMatching:
    """Perfect matching given as ascending vertex pairs sorted by first vertex."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if not (1 <= u < v <= self.n_vertices):
                raise ValueError(f"bad edge ({u},{v})")
            seen.update((u, v))
        if len(seen) != self.n_vertices or len(self.edges) != self.n_vertices // 2:
            raise ValueError("not a perfect matching")
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    def is_sparsely_arranged(self, partition: TuranPartition) -> bool:
        """Exactly one matching edge between every pair of distinct subsets."""
        color = partition.color_of()
        counts: dict[tuple[int, int], int] = {}
        for u, v in self.edges:
            cu, cv = color[u], color[v]
            if cu == cv:
                return False
            key = (min(cu, cv), max(cu, cv))
            counts[key] = counts.get(key, 0) + 1
        side = partition.n_subsets
        return all(
            counts.get((a, b), 0) == 1
            for a in range(side)
            for b in range(a + 1, side)
        )

    def relaxed_sparseness(self, partition: TuranPartition) -> tuple[bool, tuple[tuple[int, int], ...]]:
        """Sparseness allowing one within-subset edge per enlarged subset.

        Returns ``(ok, within_subset_edges)`` where ``ok`` demands exactly one
        edge between every pair of distinct subsets and at most one edge
        inside any single subset.
        """
        color = partition.color_of()
        cross: dict[tuple[int, int], int] = {}
        inside: dict[int, int] = {}
        within = []
        for u, v in self.edges:
            cu, cv = color[u], color[v]
            if cu == cv:
                inside[cu] = inside.get(cu, 0) + 1
                within.append((u, v))
            else:
                key = (min(cu, cv), max(cu, cv))
                cross[key] = cross.get(key, 0) + 1
        side = partition.n_subsets
        ok = all(
            cross.get((a, b), 0) == 1 for a in range(side) for b in range(a + 1, side)
        ) and all(c <= 1 for c in inside.values())
        return ok, tuple(sorted(within))


def turan_side(n_modes: int) -> tuple[int, int]:
    """Largest ``l`` with ``l(l+1) <= 2n`` and the leftover ``t = 2n - l(l+1)``."""
    two_n = 2 * n_modes
    side = 1
    while (side + 1) * (side + 2) <= two_n:
        side += 1
    t = two_n - side * (side + 1)
    if t % 2 != 0:
        raise AssertionError("t must be even: 2n and l(l+1) are both even")
    return side, t


def build_partition(n_modes: int) -> TuranPartition:
    """Contiguous partition into ``l+1`` subsets of size ``l`` or ``l+2``.

    The ``t`` leftover vertices are placed in pairs, two per subset starting
    from the first subset, so that every enlarged subset can carry a
    within-subset matching edge.
    """
    side, t = turan_side(n_modes)
    sizes = [side] * (side + 1)
    for i in range(t // 2):
        sizes[i] += 2
    subsets = []
    start = 1
    for size in sizes:
        subsets.append(tuple(range(start, start + size)))
        start += size
    return TuranPartition(2 * n_modes, tuple(subsets))


def sparse_matching(side: int) -> PerfectMatching:
    """Staircase sparsely arranged matching for ``2n = l(l+1)``.

    The edge between subsets ``i < j`` joins vertex ``(i-1)l + (j-1)`` of
    subset ``i`` to vertex ``(j-1)l + i`` of subset ``j``.
    """
    if side < 1:
        raise ValueError("side must be >= 1")
    edges = []
    for i in range(1, side + 2):
        for j in range(i + 1, side + 2):
            edges.append(((i - 1) * side + (j - 1), (j - 1) * side + i))
    return PerfectMatching(side * (side + 1), tuple(edges))


def general_matching(
    partition: TuranPartition, cores: list[tuple[int, ...]], extra_pairs: list[tuple[int, int] | None]
) -> PerfectMatching:
    """Staircase on the per-subset cores plus the within-subset extra edges."""
    side = partition.n_subsets - 1
    virtual = sparse_matching(side)
    edges = []
    for u, v in virtual.edges:
        iu, pu = divmod(u - 1, side)
        iv, pv = divmod(v - 1, side)
        a, b = cores[iu][pu], cores[iv][pv]
        edges.append((min(a, b), max(a, b)))
    for pair in extra_pairs:
        if pair is not None:
            edges.append(pair)
    return PerfectMatching(partition.n_vertices, tuple(edges))


def pi_permutation(matching: PerfectMatching) -> np.ndarray:
    """Permutation sending edge ``j`` (sorted order) onto the pair ``{2j-1, 2j}``.

    Returned as a 0-based array ``perm`` with ``perm[v-1] = pi(v) - 1``; the
    matching is recovered as ``{{pi^-1(2j-1), pi^-1(2j)}}``.
    """
    perm = np.empty(matching.n_vertices, dtype=np.int64)
    for j, (u, v) in enumerate(matching.edges):
        perm[u - 1] = 2 * j
        perm[v - 1] = 2 * j + 1
    return perm


def sigma_permutation(
    matching: PerfectMatching, partition: TuranPartition | None = None
) -> np.ndarray:
    """Involution swapping the endpoints of every matching edge (0-based array).

    With a partition given, verifies the re-partition property: vertices of a
    common subset land in pairwise distinct subsets, except for the endpoints
    of a within-subset edge, which stay together.
    """
    perm = np.empty(matching.n_vertices, dtype=np.int64)
    for u, v in matching.edges:
        perm[u - 1] = v - 1
        perm[v - 1] = u - 1
    if partition is not None:
        color = partition.color_of()
        within = {
            frozenset(e)
            for e in matching.edges
            if color[e[0]] == color[e[1]]
        }
        for sub in partition.subsets:
            landing: dict[int, list[int]] = {}
            for v in sub:
                landing.setdefault(color[int(perm[v - 1]) + 1], []).append(v)
            for dest, members in landing.items():
                if len(members) > 1 and frozenset(members) not in within:
                    raise ValueError(
                        f"re-partition property violated: {members} all map to subset {dest}"
                    )
    return perm


def permutation_matrix(perm: np.ndarray) -> np.ndarray:
    """Matrix ``P`` with ``P e_j = e_perm[j]``.

    Then ``(P_pi @ D)`` has row ``i`` equal to row ``pi^-1(i)`` of ``D`` and
    ``(D @ P_sigma)`` has column ``j`` equal to column ``sigma(j)`` of ``D``.
    """
    size = len(perm)
    mat = np.zeros((size, size))
    mat[perm, np.arange(size)] = 1.0
    return mat


def permutation_cycles(perm: np.ndarray) -> list[tuple[int, ...]]:
    """Cycle decomposition with 1-based labels, fixed points included."""
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        nxt = int(perm[start])
        while nxt != start:
            cycle.append(nxt)
            seen[nxt] = True
            nxt = int(perm[nxt])
        cycles.append(tuple(v + 1 for v in cycle))
    return cycles


def diag_index_sets(n_modes: int, half_degree: int) -> list[tuple[int, ...]]:
    """The index sets of products of ``half_degree`` standard pairs, lexicographic."""
    out = []
    for modes in itertools.combinations(range(1, n_modes + 1), half_degree):
        s: tuple[int, ...] = ()
        for j in modes:
            s = s + (2 * j - 1, 2 * j)
        out.append(s)
    return out


@dataclass(frozen=True)
class CoverageRow:
    subset: tuple[int, ...]
    r: int | None  # 1-based matrix index, None if uncovered
    rows: tuple[int, ...] | None
    eta: float
    path: str = "monomial"
    bound: float | None = None


@dataclass(frozen=True)
class CoverageReport:
    degree: int
    rows: tuple[CoverageRow, ...]

    @property
    def uncovered(self) -> tuple[tuple[int, ...], ...]:
        return tuple(row.subset for row in self.rows if row.r is None)

    @property
    def min_eta(self) -> float:
        return min((row.eta for row in self.rows), default=0.0)

    def row_for(self, subset) -> CoverageRow:
        key = tuple(subset)
        for row in self.rows:
            if row.subset == key:
                return row
        raise KeyError(key)


@dataclass(frozen=True)
class MeasurementEnsemble:
    """A finite family of orthogonal rotations sampled with weight 1/N each.

    The partition/matching/permutation fields carry the provenance of the
    structured constructions; ensembles assembled from arbitrary rotations
    (see :func:`custom_ensemble`) leave them unset.
    """

    n_modes: int
    degree_k: int  # half-degree: the ensemble targets degree-2k observables
    matrices: tuple[OrthogonalMatrix, ...]
    partition: TuranPartition | None = None
    matching: PerfectMatching | None = None
    pi: np.ndarray | None = None
    sigmas: tuple[np.ndarray | None, ...] | None = None
    seed: int | None = None
    retries: int = 0
    coverage: CoverageReport | None = None
    block_min_entry: float = 0.0
    within_pairs: tuple[tuple[int, int], ...] = ()

    @property
    def n_matrices(self) -> int:
        return len(self.matrices)

    @property
    def weight(self) -> float:
        return 1.0 / len(self.matrices)

    def arrays(self) -> list[np.ndarray]:
        return [m.entries for m in self.matrices]


def _best_block_pair(block: LowerFlatMatrix) -> tuple[tuple[int, int], tuple[int, int], float]:
    """Row pair, column pair and value of the largest 2x2 minor of the block."""
    f = block.entries
    size = block.size
    best = ((0, 1), (0, 1), -1.0)
    for rows in itertools.combinations(range(size), 2):
        sub = f[list(rows), :]
        for cols in itertools.combinations(range(size), 2):
            val = abs(sub[0, cols[0]] * sub[1, cols[1]] - sub[0, cols[1]] * sub[1, cols[0]])
            if val > best[2] + 1e-15:
                best = (rows, cols, val)
    return best


def _fix_block_columns(block: LowerFlatMatrix, rows, cols) -> LowerFlatMatrix:
    """Permute columns so the chosen minor sits on the ``rows x rows`` positions."""
    perm = list(range(block.size))

    def place(pos, val):
        cur = perm.index(val)
        perm[pos], perm[cur] = perm[cur], perm[pos]

    place(rows[0], cols[0])
    place(rows[1], cols[1])
    return LowerFlatMatrix(block.entries[:, perm])


def _blocks_and_extras(partition: TuranPartition):
    """Lower-flat block per subset plus core labels and within-subset pairs.

    Enlarged subsets (size ``l+2``) reserve two vertices that are matched to
    each other; the block columns are permuted so the reserved pair's own
    2x2 minor attains the block's best value, which orthogonality forces to
    be at least twice the squared smallest entry.
    """
    side = partition.n_subsets - 1
    blocks: list[LowerFlatMatrix] = []
    cores: list[tuple[int, ...]] = []
    extra_pairs: list[tuple[int, int] | None] = []
    for sub in partition.subsets:
        block = lower_flat(len(sub))
        if len(sub) == side:
            blocks.append(block)
            cores.append(tuple(sub))
            extra_pairs.append(None)
            continue
        rows, cols, _ = _best_block_pair(block)
        if cols != rows:
            block = _fix_block_columns(block, rows, cols)
        pair = (sub[rows[0]], sub[rows[1]])
        blocks.append(block)
        cores.append(tuple(v for v in sub if v not in pair))
        extra_pairs.append(pair)
    return blocks, cores, extra_pairs


def _block_diagonal(blocks: list[LowerFlatMatrix], size: int) -> np.ndarray:
    d = np.zeros((size, size))
    at = 0
    for b in blocks:
        d[at : at + b.size, at : at + b.size] = b.entries
        at += b.size
    return d


def _base_rotation(n_modes: int):
    """The pieces shared by both ensemble builders: O1 = P_pi D and friends."""
    partition = build_partition(n_modes)
    blocks, cores, extra_pairs = _blocks_and_extras(partition)
    matching = general_matching(partition, cores, extra_pairs)
    sparse_ok, within_edges = matching.relaxed_sparseness(partition)
    if not sparse_ok or set(within_edges) != {p for p in extra_pairs if p}:
        raise AssertionError("matching lost the sparse arrangement")
    pi = pi_permutation(matching)
    d = _block_diagonal(blocks, 2 * n_modes)
    o1 = permutation_matrix(pi) @ d
    min_entry = min(b.min_abs_entry for b in blocks)
    within = tuple(sorted(p for p in extra_pairs if p is not None))
    return partition, blocks, matching, pi, o1, min_entry, within


def degree2_ensemble(n_modes: int) -> MeasurementEnsemble:
    """The two-rotation ensemble jointly measuring all degree-2 observables.

    For ``n = 1`` a single rotation already covers the unique observable and
    the ensemble has one matrix.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    partition, blocks, matching, pi, o1, min_entry, within = _base_rotation(n_modes)
    if n_modes == 1:
        matrices = (OrthogonalMatrix(o1),)
        sigmas: tuple[np.ndarray | None, ...] = (None,)
    else:
        sigma = sigma_permutation(matching, partition)
        o2 = o1 @ permutation_matrix(sigma)
        matrices = (OrthogonalMatrix(o1), OrthogonalMatrix(o2))
        sigmas = (None, sigma)
    ensemble = MeasurementEnsemble(
        n_modes=n_modes,
        degree_k=1,
        matrices=matrices,
        partition=partition,
        matching=matching,
        pi=pi,
        sigmas=sigmas,
        block_min_entry=min_entry,
        within_pairs=within,
    )
    coverage = ensemble_coverage(ensemble)
    _certify_degree2(coverage, blocks, partition, within, ensemble.sigmas[-1])
    return dataclasses.replace(ensemble, coverage=coverage)


def _certify_degree2(coverage, blocks, partition, within_pairs, sigma):
    """Check every pair meets the sharpness bound of its guaranteed route.

    Cross-subset pairs are covered by the first rotation at a product of two
    lower-flat entries; same-subset pairs by the second rotation at a product
    taken in the blocks their sigma-images land in; the reserved extra pairs
    by the orthogonality-forced minor, worth twice the squared smallest entry
    of their block.
    """
    color = partition.color_of()
    within = {frozenset(p) for p in within_pairs}
    for row in coverage.rows:
        a, b = row.subset
        ca, cb = color[a], color[b]
        if frozenset(row.subset) in within:
            bound = 2.0 * blocks[ca].min_abs_entry ** 2
        elif ca == cb:
            ia, ib = color[int(sigma[a - 1]) + 1], color[int(sigma[b - 1]) + 1]
            bound = blocks[ia].min_abs_entry * blocks[ib].min_abs_entry
        else:
            bound = blocks[ca].min_abs_entry * blocks[cb].min_abs_entry
        if row.r is None or row.eta < bound - 1e-12:
            raise CoverageError(
                f"pair {row.subset} covered at {row.eta:.3e}, below bound {bound:.3e}"
            )


def scan_minors(arrays, n_modes: int, half_degree: int, threads: int = 1):
    """Best minor per size-2k support over matrices and diagonal row sets.

    Returns ``(supports, rows_sets, best_eta, best_r, best_rows_index)``
    where the argmax is lexicographically smallest in ``(r, rows)`` on ties.
    With ``threads > 1`` the supports are scanned in parallel chunks; the
    max-reduction is order-independent, so results match the serial scan.
    """
    supports = list(itertools.combinations(range(1, 2 * n_modes + 1), 2 * half_degree))
    row_sets = diag_index_sets(n_modes, half_degree)
    cols = np.array(supports, dtype=np.int64) - 1  # (nS, 2k)
    rows = np.array(row_sets, dtype=np.int64) - 1  # (nR, 2k)
    n_s, n_r = len(supports), len(row_sets)

    def scan_chunk(sel):
        chunk_cols = cols[sel]
        eta = np.zeros(len(sel))
        best_r = np.full(len(sel), -1, dtype=np.int64)
        best_rows = np.full(len(sel), -1, dtype=np.int64)
        for r, arr in enumerate(arrays):
            # minors[i, j] = |det arr[rows_i, cols_j]| over both axes at once
            sub = arr[rows[:, None, :, None], chunk_cols[None, :, None, :]]
            minors = np.abs(np.linalg.det(sub))
            for i in range(n_r):
                better = minors[i] > eta + COVERAGE_TOL
                eta[better] = minors[i][better]
                best_r[better] = r
                best_rows[better] = i
        return eta, best_r, best_rows

    if threads <= 1 or n_s < 2 * threads:
        best_eta, best_r, best_rows = scan_chunk(np.arange(n_s))
    else:
        from concurrent.futures import ThreadPoolExecutor

        chunks = np.array_split(np.arange(n_s), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(scan_chunk, chunks))
        best_eta = np.concatenate([p[0] for p in parts])
        best_r = np.concatenate([p[1] for p in parts])
        best_rows = np.concatenate([p[2] for p in parts])
    return supports, row_sets, best_eta, best_r, best_rows


def ensemble_coverage(ensemble: MeasurementEnsemble) -> CoverageReport:
    """Per-support best minor of an ensemble, with uncovered supports flagged."""
    arrays = ensemble.arrays()
    supports, row_sets, eta, r_idx, rows_idx = scan_minors(
        arrays, ensemble.n_modes, ensemble.degree_k
    )
    within = {frozenset(p) for p in ensemble.within_pairs}
    rows = []
    for s_i, subset in enumerate(supports):
        if eta[s_i] <= COVERAGE_TOL:
            rows.append(CoverageRow(subset, None, None, 0.0))
            continue
        path = "same-subset" if frozenset(subset) in within else "monomial"
        rows.append(
            CoverageRow(
                subset,
                int(r_idx[s_i]) + 1,
                row_sets[int(rows_idx[s_i])],
                float(eta[s_i]),
                path,
            )
        )
    return CoverageReport(2 * ensemble.degree_k, tuple(rows))


def is_generated(subset, partition_blocks) -> bool:
    """True when no two elements of ``subset`` fall in one partition block."""
    colors = [partition_blocks[v] for v in subset]
    return len(set(colors)) == len(colors)


def degree2k_ensemble(
    n_modes: int,
    half_degree: int,
    n_matrices: int | None = None,
    seed: int | None = None,
    max_retries: int = 200,
) -> MeasurementEnsemble:
    """Randomized ensemble covering all degree-2k observables.

    Each rotation permutes the columns of the base rotation by a uniformly
    random permutation (Fisher-Yates through the seeded generator).  A
    rotation covers a support when its best diagonal-row minor meets the
    lower-flat product bound; when the union of covers is incomplete the
    weakest permutation is resampled, up to ``max_retries`` times.
    """
    if half_degree < 1:
        raise ValueError("half_degree must be >= 1")
    side, _ = turan_side(n_modes)
    if 2 * half_degree > side + 1:
        raise ValueError(
            f"degree 2k={2 * half_degree} too large: needs 2k <= l+1 = {side + 1}"
        )
    if n_matrices is None:
        n_matrices = 4 * half_degree + 1
    if seed is None:
        raise ValueError("seed is mandatory for the randomized construction")
    # counter-based generator for bit-reproducible ensembles across platforms
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    partition, blocks, matching, pi, o1, min_entry, within = _base_rotation(n_modes)
    two_n = 2 * n_modes
    threshold = min_entry ** (2 * half_degree)

    def covered_mask(sigma: np.ndarray) -> np.ndarray:
        # supports whose best minor under this rotation meets the sharpness bound
        rotated = o1 @ permutation_matrix(sigma)
        _, _, eta, _, _ = scan_minors([rotated], n_modes, half_degree)
        return eta >= threshold - 1e-12

    sigmas = [rng.permutation(two_n) for _ in range(n_matrices)]
    masks = [covered_mask(s) for s in sigmas]
    retries = 0
    while not np.any(np.vstack(masks), axis=0).all():
        if retries >= max_retries:
            raise CoverageError(
                f"coverage not achieved within {max_retries} resamples"
            )
        weakest = int(np.argmin([m.sum() for m in masks]))
        sigmas[weakest] = rng.permutation(two_n)
        masks[weakest] = covered_mask(sigmas[weakest])
        retries += 1
    matrices = tuple(
        OrthogonalMatrix(o1 @ permutation_matrix(s)) for s in sigmas
    )
    ensemble = MeasurementEnsemble(
        n_modes=n_modes,
        degree_k=half_degree,
        matrices=matrices,
        partition=partition,
        matching=matching,
        pi=pi,
        sigmas=tuple(sigmas),
        seed=seed,
        retries=retries,
        block_min_entry=min_entry,
        within_pairs=within,
    )
    coverage = ensemble_coverage(ensemble)
    if coverage.uncovered:
        raise CoverageError(f"uncovered supports remain: {coverage.uncovered[:5]}")
    if coverage.min_eta < threshold - 1e-12:
        raise CoverageError(
            f"min sharpness {coverage.min_eta:.3e} below bound {threshold:.3e}"
        )
    return dataclasses.replace(ensemble, coverage=coverage)


def custom_ensemble(
    n_modes: int, half_degree: int, matrices, seed: int | None = None
) -> MeasurementEnsemble:
    """Wrap arbitrary orthogonal rotations as an ensemble with a coverage scan.

    Supports with all-zero minors are tolerated here (the report flags
    them); estimation rejects uncovered targets downstream.
    """
    mats = tuple(
        m if isinstance(m, OrthogonalMatrix) else OrthogonalMatrix(np.asarray(m, dtype=float))
        for m in matrices
    )
    ensemble = MeasurementEnsemble(
        n_modes=n_modes, degree_k=half_degree, matrices=mats, seed=seed
    )
    return dataclasses.replace(ensemble, coverage=ensemble_coverage(ensemble))


def partition_failure_prob(side: int, half_degree: int) -> float:
    """Probability a uniform partition fails to separate a fixed 2k-set.

    Exact value ``1 - l^{2k} C(l+1, 2k) / C(l(l+1), 2k)`` for the Turan
    graph on ``2n = l(l+1)`` vertices.
    """
    if side < 1:
        raise ValueError("side must be >= 1")
    if 2 * half_degree > side + 1:
        raise ValueError("need 2k <= l + 1")
    two_n = side * (side + 1)
    num = Fraction(side ** (2 * half_degree)) * math.comb(side + 1, 2 * half_degree)
    prob = 1 - num / math.comb(two_n, 2 * half_degree)
    return float(prob)


def random_partition(side: int, rng) -> np.ndarray:
    """Uniform partition of ``{0..l(l+1)-1}`` into ``l+1`` blocks of size ``l``.

    Returned as an array mapping vertex (0-based) to block index.
    """
    two_n = side * (side + 1)
    perm = rng.permutation(two_n)
    colors = np.empty(two_n, dtype=np.int64)
    colors[perm] = np.arange(two_n) // side
    return colors


def random_partition_batch(side: int, trials: int, rng) -> np.ndarray:
    """``trials`` independent uniform partitions, one color row each."""
    two_n = side * (side + 1)
    ranks = np.argsort(rng.random((trials, two_n)), axis=1)
    colors = np.empty((trials, two_n), dtype=np.int64)
    np.put_along_axis(colors, ranks, np.broadcast_to(np.arange(two_n) // side, (trials, two_n)), axis=1)
    return colors
