"""Data ingestion and synthetic generators.

All file formats are plain decimal CSV: feature tables (optional header and
label column), square dissimilarity matrices, and embedding outputs with
headers x0..x{m-1}[,label].
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data_model import Dataset, DissimilarityProvider, Embedding, provider_from_packed
from .errors import DataError

SYMMETRY_REL_TOL = 1e-9


@dataclass
class BlobSpec:
    n: int
    d: int
    k_clusters: int = 5
    cluster_std: float = 1.0
    center_box: float = 10.0
    rng_seed: int = 0

    def validate(self) -> None:
        if self.k_clusters < 1:
            raise DataError("need at least 1 cluster")
        if self.n < self.k_clusters:
            raise DataError(f"n={self.n} smaller than k_clusters={self.k_clusters}")
        if self.d < 1:
            raise DataError("need at least 1 dimension")
        if self.cluster_std < 0:
            raise DataError("cluster_std must be >= 0")
        if not self.center_box > 0:
            raise DataError("center_box must be positive")


def generate_blobs(spec: BlobSpec) -> Dataset:
    """Gaussian blobs around uniform random centers, round-robin assignment."""
    spec.validate()
    rng = np.random.default_rng(spec.rng_seed)
    centers = rng.uniform(-spec.center_box, spec.center_box, size=(spec.k_clusters, spec.d))
    assign = np.arange(spec.n) % spec.k_clusters
    noise = rng.normal(0.0, spec.cluster_std, size=(spec.n, spec.d))
    features = centers[assign] + noise
    name = f"blobs_n{spec.n}_d{spec.d}_k{spec.k_clusters}"
    return Dataset(features=features, labels=[int(a) for a in assign], name=name)


def _parse_cell(text: str, row: int, col: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"cannot parse {text!r} as a number at row {row}, column {col}") from None
    if not math.isfinite(value):
        raise DataError(f"non-finite value {text!r} at row {row}, column {col}")
    return value


def load_feature_csv(
    path: str | Path,
    has_header: bool = False,
    label_column: str | int | None = None,
) -> Dataset:
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = None
    if has_header:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: header but no data rows")
    width = len(rows[0])
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, int):
            label_idx = label_column
        else:
            if header is None:
                raise DataError("label column by name requires a header")
            if label_column not in header:
                raise DataError(f"label column {label_column!r} not in header {header}")
            label_idx = header.index(label_column)
        if not 0 <= label_idx < width:
            raise DataError(f"label column index {label_idx} out of range")
    features = []
    labels = [] if label_idx is not None else None
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {r} has {len(row)} cells, expected {width}")
        vals = []
        for c, cell in enumerate(row):
            if c == label_idx:
                labels.append(cell.strip())
            else:
                vals.append(_parse_cell(cell.strip(), r, c))
        features.append(vals)
    if not features or not features[0]:
        raise DataError(f"{path}: no feature columns")
    return Dataset(features=np.array(features), labels=labels, name=path.stem)


def load_dissimilarity_csv(path: str | Path) -> DissimilarityProvider:
    """Square symmetric non-negative matrix with zero diagonal; small
    asymmetries (relative 1e-9) are averaged away."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    n = len(rows)
    mat = np.empty((n, n))
    for r, row in enumerate(rows):
        if len(row) != n:
            raise DataError(f"{path}: row {r} has {len(row)} cells, matrix needs {n}")
        for c, cell in enumerate(row):
            mat[r, c] = _parse_cell(cell.strip(), r, c)
    if (mat < 0).any():
        r, c = np.argwhere(mat < 0)[0]
        raise DataError(f"{path}: negative dissimilarity at row {r}, column {c}")
    scale = max(float(mat.max()), 1.0)
    diag = np.abs(np.diag(mat))
    if (diag > SYMMETRY_REL_TOL * scale).any():
        raise DataError(f"{path}: diagonal must be zero (max {diag.max():g})")
    gap = np.abs(mat - mat.T)
    ref = np.maximum(np.abs(mat), np.abs(mat.T))
    # small multiplicative slack absorbs decimal-to-binary representation error
    tol = SYMMETRY_REL_TOL * np.maximum(ref, 1e-300) * (1 + 1e-4)
    if (gap > tol).any():
        r, c = np.argwhere(gap > tol)[0]
        raise DataError(
            f"{path}: asymmetric beyond tolerance at ({r}, {c}): "
            f"{mat[r, c]!r} vs {mat[c, r]!r}"
        )
    sym = (mat + mat.T) / 2.0
    iu = np.triu_indices(n, k=1)
    return provider_from_packed(sym[iu].copy(), n, name=path.stem)


def save_embedding_csv(
    emb: Embedding, labels: list | None, path: str | Path
) -> None:
    """17-significant-digit decimal serialization; round-trips to 1e-12."""
    if labels is not None and len(labels) != emb.n:
        raise DataError(f"{len(labels)} labels for {emb.n} points")
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = [f"x{c}" for c in range(emb.m)]
            if labels is not None:
                header.append("label")
            writer.writerow(header)
            for r in range(emb.n):
                row = [f"{v:.17g}" for v in emb.coords[r]]
                if labels is not None:
                    row.append(str(labels[r]))
                writer.writerow(row)
    except OSError as exc:
        raise DataError(f"cannot write embedding to {path}: {exc}") from exc


def load_embedding_csv(path: str | Path) -> tuple[Embedding, list | None]:
    with open(path, newline="") as fh:
        header = [c.strip() for c in next(csv.reader(fh))]
    label = "label" if header and header[-1] == "label" else None
    ds = load_feature_csv(path, has_header=True, label_column=label)
    return Embedding(ds.features), ds.labels
