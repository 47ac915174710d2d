"""File formats: matrix text, ensemble archives, CSV tables, JSON reports.

Matrix text: first line the size, then row-major entries with 17
significant digits (full float round-trip).  Ensemble archive: a zip of
matrix files plus a metadata document and the coverage table.  State JSON:
amplitude list (pure) or row-major density matrix, with qubit 1 living in
the least-significant bit of the basis index, matching the dense
convention used throughout.
"""

from __future__ import annotations

import csv
import io as _io
import json
import zipfile
import zlib

import numpy as np

from majorana_jm.matching import (
    CoverageReport,
    MeasurementEnsemble,
    custom_ensemble,
    permutation_cycles,
)
from majorana_jm.robustness import RobustnessReport
from majorana_jm.sampling import EstimationRecord, FermionicState, ShotBatch

__all__ = [
    "write_matrix_text",
    "read_matrix_text",
    "matrix_to_text",
    "matrix_from_text",
    "write_ensemble_archive",
    "read_ensemble_archive",
    "coverage_csv",
    "sharpness_csv",
    "shot_log_csv",
    "estimation_report_json",
    "robustness_report_json",
    "comparison_csv",
    "state_from_json",
    "state_to_json",
    "rng_for",
]


def matrix_to_text(arr: np.ndarray) -> str:
    arr = np.asarray(arr, dtype=float)
    lines = [str(arr.shape[0])]
    for row in arr:
        lines.append(" ".join(format(v, ".17g") for v in row))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    size = int(lines[0])
    rows = [[float(tok) for tok in ln.split()] for ln in lines[1 : size + 1]]
    arr = np.array(rows)
    if arr.shape != (size, size):
        raise ValueError("matrix text is malformed")
    return arr


def write_matrix_text(path, arr: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(matrix_to_text(arr))


def read_matrix_text(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_text(fh.read())


def coverage_csv(report: CoverageReport) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["S", "r", "R", "eta"])
    for row in report.rows:
        writer.writerow(
            [
                "[" + ",".join(map(str, row.subset)) + "]",
                "" if row.r is None else row.r,
                "" if row.rows is None else "[" + ",".join(map(str, row.rows)) + "]",
                format(row.eta, ".17g"),
            ]
        )
    return buf.getvalue()


def sharpness_csv(table) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["S", "r", "R", "eta_RS", "eta_S", "eta_effective"])
    for row in table.rows:
        writer.writerow(
            [
                "[" + ",".join(map(str, row.subset)) + "]",
                row.r,
                "[" + ",".join(map(str, row.rows)) + "]",
                format(row.eta_rs, ".17g"),
                format(row.eta_s, ".17g"),
                format(row.eta_effective, ".17g"),
            ]
        )
    return buf.getvalue()


def write_ensemble_archive(path, ensemble: MeasurementEnsemble) -> None:
    """Zip archive of matrices, construction metadata and the coverage table."""
    meta = {
        "format": "majorana-jm ensemble v1",
        "n_modes": ensemble.n_modes,
        "degree_k": ensemble.degree_k,
        "n_matrices": ensemble.n_matrices,
        "seed": ensemble.seed,
        "retries": ensemble.retries,
        "block_min_entry": ensemble.block_min_entry,
        "within_pairs": [list(p) for p in ensemble.within_pairs],
        "pi_cycles": None
        if ensemble.pi is None
        else [list(c) for c in permutation_cycles(ensemble.pi)],
        "sigma_cycles": None
        if ensemble.sigmas is None
        else [
            None if s is None else [list(c) for c in permutation_cycles(s)]
            for s in ensemble.sigmas
        ],
        "partition": None
        if ensemble.partition is None
        else [list(s) for s in ensemble.partition.subsets],
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_DEFLATED) as zf:
        zf.writestr("metadata.json", json.dumps(meta, indent=2, sort_keys=True))
        for r, mat in enumerate(ensemble.matrices, start=1):
            zf.writestr(f"matrix_{r}.txt", matrix_to_text(mat.entries))
        if ensemble.coverage is not None:
            zf.writestr("coverage.csv", coverage_csv(ensemble.coverage))


def read_ensemble_archive(path) -> MeasurementEnsemble:
    """Rebuild an ensemble from an archive, re-running the coverage scan."""
    with zipfile.ZipFile(path) as zf:
        meta = json.loads(zf.read("metadata.json"))
        mats = []
        for r in range(1, meta["n_matrices"] + 1):
            mats.append(matrix_from_text(zf.read(f"matrix_{r}.txt").decode()))
    return custom_ensemble(
        meta["n_modes"], meta["degree_k"], mats, seed=meta.get("seed")
    )


def shot_log_csv(batch: ShotBatch) -> str:
    """Columns shot_id, r, x_bits, q_bits; bit j set means index j+1 flipped.

    ``x_bits`` is the conjugation support mask; ``q_bits`` packs the basis
    outcomes with bit j = (1 - q_j)/2 (mode j+1), both in lowercase hex.
    """
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["shot_id", "r", "x_bits", "q_bits"])
    q_bits = ((1 - batch.q.astype(np.int64)) // 2) << np.arange(batch.n_modes)
    packed = q_bits.sum(axis=1)
    for i in range(len(batch)):
        writer.writerow(
            [i, int(batch.r[i]), format(int(batch.conj_mask[i]), "x"), format(int(packed[i]), "x")]
        )
    return buf.getvalue()


def _record_dict(rec: EstimationRecord) -> dict:
    out = {
        "target": list(rec.target) if isinstance(rec.target, tuple) else rec.target,
        "estimate": rec.estimate,
        "shots": rec.shots,
        "stderr": rec.stderr,
    }
    if rec.predicted_variance is not None:
        out["predicted_variance"] = rec.predicted_variance
    return out


def estimation_report_json(
    records, hamiltonian_record: EstimationRecord | None = None, meta: dict | None = None
) -> str:
    payload = {"estimates": [_record_dict(r) for r in records]}
    if hamiltonian_record is not None:
        payload["hamiltonian"] = _record_dict(hamiltonian_record)
    if meta:
        payload.update(meta)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def robustness_report_json(report: RobustnessReport, status: str = "ok") -> str:
    payload = {
        "n": report.n_modes,
        "k": report.degree,
        "method": report.method,
        "value": report.value,
        "section": report.section,
        "bounds": report.bounds,
        "status": status,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def comparison_csv(rows) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [
        "n",
        "k",
        "eta_construction",
        "eta_ternary",
        "shadow_jm_bound",
        "ho_bound",
        "thm2_upper",
    ]
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [
                row["n"],
                row["k"],
                *(
                    ""
                    if row[c] is None
                    else format(row[c], ".17g")
                    for c in header[2:]
                ),
            ]
        )
    return buf.getvalue()


def state_from_json(data) -> FermionicState:
    """Parse ``{"n_modes": n, "amplitudes": [...]}`` or a density variant.

    Complex entries appear as ``[re, im]`` pairs or plain reals; qubit 1
    occupies the least-significant bit of the basis index.
    """
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    n = int(data["n_modes"])

    def as_complex(v):
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1])
        return complex(v)

    if "amplitudes" in data:
        vec = np.array([as_complex(v) for v in data["amplitudes"]])
        return FermionicState(n, vector=vec)
    if "density" in data:
        rho = np.array([[as_complex(v) for v in row] for row in data["density"]])
        return FermionicState(n, density_matrix=rho)
    raise ValueError("state JSON needs 'amplitudes' or 'density'")


def state_to_json(state: FermionicState) -> str:
    if state.is_pure:
        payload = {
            "n_modes": state.n_modes,
            "amplitudes": [[v.real, v.imag] for v in state.vector],
        }
    else:
        payload = {
            "n_modes": state.n_modes,
            "density": [
                [[v.real, v.imag] for v in row] for row in state.density_matrix
            ],
        }
    return json.dumps(payload, sort_keys=True) + "\n"


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Labeled counter-based substream of one master seed."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([seed, zlib.crc32(label.encode())]))
    )
