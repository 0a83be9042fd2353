"""Monte Carlo search over random qubit frames for extremal log-det statistics.

A frame is four pure states, i.e. four points on the Bloch sphere, with
pairwise overlaps |<i|j>|^2 = (1 + n_i . n_j) / 2.  Uniform directions come
from normalized standard Gaussian triples.  The search ranks frames by the
shot-noise variance of log |det P|, by the gap of its Frobenius upper bound
and by det P, tracking the best K of each; the SIC tetrahedron is the
conjectured optimum of all three.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .sampling import substream

__all__ = [
    "Frame",
    "SearchRecord",
    "FrameSearchResult",
    "METRICS",
    "sic_frame",
    "random_frame",
    "frame_metrics",
    "frame_search",
]

METRICS = ("variance", "delta_f", "det")

#: trials are consumed in fixed-size blocks, one RNG substream per block,
#: so results depend only on (seed, n_trials) and k-best merging stays
#: associative across workers
_BLOCK = 100_000

_SIC_PROB = (2.0 * np.eye(4) + 1.0) / 3.0


@dataclass(frozen=True)
class Frame:
    """Four unit Bloch vectors defining states and matching effects."""

    bloch: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bloch, dtype=float)
        if b.shape != (4, 3):
            raise ValueError("a qubit frame is four 3-vectors")
        if np.abs(np.linalg.norm(b, axis=1) - 1.0).max() > 1e-12:
            raise ValueError("Bloch vectors must have unit norm")
        object.__setattr__(self, "bloch", b)

    @property
    def prob(self) -> np.ndarray:
        """Overlap matrix (1 + n_k . n_i) / 2; diagonal is exactly 1."""
        p = 0.5 * (1.0 + self.bloch @ self.bloch.T)
        np.fill_diagonal(p, 1.0)
        return p


@dataclass(frozen=True)
class SearchRecord:
    """One ranked frame: metric value, the frame, and its distance to SIC.

    The distance is the max-norm max |P_ki - P_ki^sic| between overlap
    matrices, which is rotation invariant because both matrices are.
    """

    value: float
    frame: Frame
    metric: str
    distance_to_sic: float
    trial_index: int


@dataclass(frozen=True)
class FrameSearchResult:
    records: dict[str, list[SearchRecord]] = field(repr=False)
    trials: int
    discarded: int

    def write_csv(self, path) -> None:
        cols = [f"n{i}{ax}" for i in range(1, 5) for ax in "xyz"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["metric", "rank", "value", "distance_to_sic"] + cols)
            for metric, records in self.records.items():
                for rank, rec in enumerate(records, start=1):
                    writer.writerow(
                        [metric, rank, repr(rec.value), repr(rec.distance_to_sic)]
                        + [repr(x) for x in rec.frame.bloch.ravel()]
                    )


def sic_frame() -> Frame:
    """The regular tetrahedron, apex at +z."""
    b = np.array(
        [
            [0.0, 0.0, 1.0],
            [2.0 * np.sqrt(2.0) / 3.0, 0.0, -1.0 / 3.0],
            [-np.sqrt(2.0) / 3.0, np.sqrt(2.0 / 3.0), -1.0 / 3.0],
            [-np.sqrt(2.0) / 3.0, -np.sqrt(2.0 / 3.0), -1.0 / 3.0],
        ]
    )
    return Frame(b / np.linalg.norm(b, axis=1, keepdims=True))


def random_frame(seed_or_rng) -> Frame:
    """Frame of four i.i.d. uniform sphere points (normalized Gaussian triples)."""
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else substream(int(seed_or_rng))
    v = rng.standard_normal((4, 3))
    return Frame(v / np.linalg.norm(v, axis=1, keepdims=True))


def _batch_metrics(probs: np.ndarray) -> dict[str, np.ndarray]:
    dets = np.linalg.det(probs)
    inv = np.linalg.inv(probs)
    variance = np.einsum("bik,bki->b", inv**2, probs * (1.0 - probs))
    delta_f = 0.25 * np.einsum("bik,bik->b", inv, inv) - variance
    return {"variance": variance, "delta_f": delta_f, "det": dets}


def frame_metrics(frame: Frame, n_s: int = 1) -> dict[str, float]:
    """variance, delta_f (both at the given shot count) and det of one frame."""
    out = _batch_metrics(frame.prob[None])
    return {
        "variance": float(out["variance"][0]) / n_s,
        "delta_f": float(out["delta_f"][0]) / n_s,
        "det": float(out["det"][0]),
    }


def _merge_top(best, vals, idx, bloch, k, largest):
    order_vals = -vals if largest else vals
    if best is None:
        pool_vals, pool_idx, pool_bloch = order_vals, idx, bloch
    else:
        pool_vals = np.concatenate([best[0], order_vals])
        pool_idx = np.concatenate([best[1], idx])
        pool_bloch = np.concatenate([best[2], bloch])
    order = np.lexsort((pool_idx, pool_vals))[:k]
    return pool_vals[order], pool_idx[order], pool_bloch[order]


def frame_search(
    r: int,
    k: int = 100,
    det_floor: float = 1e-5,
    metrics: tuple[str, ...] = METRICS,
    seed: int = 0,
    include: tuple[Frame, ...] = (),
) -> FrameSearchResult:
    """Scan ``r`` random frames and keep the best ``k`` per metric.

    variance and delta_f are minimized (at N_s = 1), det is maximized.
    Frames with det below ``det_floor`` are discarded and counted.  Ties
    rank by earlier trial index; ``include`` frames are evaluated first
    with negative indices, so an injected frame wins every tie.
    """
    if r < k:
        raise ValueError("need at least k trials")
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics {sorted(unknown)}")
    best = {m: None for m in metrics}
    discarded = 0
    done = 0
    block = 0

    def consume(bloch: np.ndarray, first_index: int):
        nonlocal discarded
        probs = 0.5 * (1.0 + np.einsum("bik,bjk->bij", bloch, bloch))
        for i in range(4):
            probs[:, i, i] = 1.0
        dets = np.linalg.det(probs)
        keep = dets > det_floor
        discarded += int((~keep).sum())
        if not keep.any():
            return
        idx = first_index + np.nonzero(keep)[0]
        vals = _batch_metrics(probs[keep])
        for m in metrics:
            best[m] = _merge_top(best[m], vals[m], idx, bloch[keep], k, largest=(m == "det"))

    if include:
        consume(np.stack([f.bloch for f in include]), first_index=-len(include))
    while done < r:
        n = min(_BLOCK, r - done)
        rng = substream(seed, block)
        v = rng.standard_normal((_BLOCK, 4, 3))[:n]
        consume(v / np.linalg.norm(v, axis=2, keepdims=True), first_index=done)
        done += n
        block += 1

    records: dict[str, list[SearchRecord]] = {}
    for m in metrics:
        vals, idx, bloch = best[m]
        signed = -vals if m == "det" else vals
        records[m] = [
            SearchRecord(
                value=float(val),
                frame=Frame(b),
                metric=m,
                distance_to_sic=float(np.abs(0.5 * (1.0 + b @ b.T) - _SIC_PROB).max()),
                trial_index=int(i),
            )
            for val, i, b in zip(signed, idx, bloch)
        ]
    return FrameSearchResult(records, trials=r + len(include), discarded=discarded)
