"""Vector-quantized patch codebook backed by seeded k-means.

A codebook holds K centroids over flattened non-overlapping patch_h x
patch_w x 3 blocks. Images are encoded as integer code grids; the value
K itself (one past the last valid code) is the reserved MASK sentinel
marking positions that a sampler still has to fill in.

Training is plain Lloyd's algorithm with k-means++ initialization,
hand-rolled so a seed fixes the result bit-for-bit (assignment uses a
fixed reduction order, no parallel nondeterminism).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"VQCB"
MAX_ITER = 50
SHIFT_TOL = 1e-6


@dataclass
class Codebook:
    entries: np.ndarray  # (K, patch_h*patch_w*3) float32
    patch_h: int
    patch_w: int
    # mean squared patch distance at each Lloyd assignment, training only
    history: list = field(default_factory=list, repr=False, compare=False)

    @property
    def num_entries(self) -> int:
        return int(self.entries.shape[0])

    @property
    def mask_code(self) -> int:
        """The MASK sentinel: one past the last valid code index."""
        return self.num_entries


def image_patches(img: np.ndarray, patch_h: int, patch_w: int) -> np.ndarray:
    """Flatten an image into its non-overlapping patches, (n, ph*pw*3)."""
    h, w = img.shape[:2]
    if h % patch_h or w % patch_w:
        raise ValueError(f"image {h}x{w} not divisible by patch {patch_h}x{patch_w}")
    rows, cols = h // patch_h, w // patch_w
    blocks = img.reshape(rows, patch_h, cols, patch_w, 3)
    return blocks.transpose(0, 2, 1, 3, 4).reshape(rows * cols, patch_h * patch_w * 3)


def _pairwise_sq_dist(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(n, k) squared Euclidean distances via the expanded form."""
    x2 = np.einsum("ij,ij->i", x, x)
    c2 = np.einsum("ij,ij->i", centers, centers)
    d2 = x2[:, None] - 2.0 * (x @ centers.T) + c2[None, :]
    np.maximum(d2, 0.0, out=d2)
    return d2


def _assign(x: np.ndarray, centers: np.ndarray):
    d2 = _pairwise_sq_dist(x, centers)
    labels = np.argmin(d2, axis=1)
    best = d2[np.arange(x.shape[0]), labels]
    return labels, best


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    centers[0] = x[int(rng.integers(n))]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for m in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            raise ValueError(
                f"training set has fewer than {k} distinct patches "
                f"(exhausted after {m})")
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
        if idx >= n or d2[idx] <= 0.0:
            idx = int(np.argmax(d2))
        centers[m] = x[idx]
        d2 = np.minimum(d2, ((x - centers[m]) ** 2).sum(axis=1))
    return centers


def _cluster_means(x: np.ndarray, labels: np.ndarray, k: int):
    order = np.argsort(labels, kind="stable")
    xs = x[order]
    counts = np.bincount(labels, minlength=k)
    starts = np.searchsorted(labels[order], np.arange(k), side="left")
    nonempty = counts > 0
    sums = np.zeros((k, x.shape[1]), dtype=np.float64)
    sums[nonempty] = np.add.reduceat(xs, starts[nonempty], axis=0)
    return sums, counts


def _lloyd(x: np.ndarray, centers: np.ndarray):
    history = []
    for _ in range(MAX_ITER):
        labels, best = _assign(x, centers)
        history.append(float(best.mean()))
        sums, counts = _cluster_means(x, labels, centers.shape[0])
        new_centers = centers.copy()
        nonempty = counts > 0
        new_centers[nonempty] = sums[nonempty] / counts[nonempty, None]
        # Restart each empty cluster at the worst-fit patch.
        for e in np.flatnonzero(~nonempty):
            idx = int(np.argmax(best))
            new_centers[e] = x[idx]
            best[idx] = 0.0
        shift = float(np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max())
        centers = new_centers
        if shift < SHIFT_TOL:
            break
    return centers, history


def train_codebook(images: list[np.ndarray], k: int, patch: int, seed: int,
                   max_patches: int | None = None) -> Codebook:
    """K-means codebook over all non-overlapping patches of `images`.

    Deterministic given `seed` (k-means++ init, fixed iteration order,
    cap of 50 sweeps or max centroid shift < 1e-6). max_patches, if set,
    subsamples the pooled training patches with the same seeded RNG.
    """
    if k < 2:
        raise ValueError(f"codebook size must be >= 2, got {k}")
    if not images:
        raise ValueError("no training images")
    x = np.concatenate([image_patches(img, patch, patch) for img in images], axis=0)
    rng = np.random.default_rng(seed)
    if max_patches is not None and x.shape[0] > max_patches:
        keep = rng.choice(x.shape[0], size=max_patches, replace=False)
        x = x[np.sort(keep)]
    if x.shape[0] < k:
        raise ValueError(f"need at least {k} training patches, got {x.shape[0]}")
    centers = _kmeans_pp_init(x, k, rng)
    centers, history = _lloyd(x, centers)
    return Codebook(entries=centers.astype(np.float32), patch_h=patch,
                    patch_w=patch, history=history)


def encode(img: np.ndarray, cb: Codebook) -> np.ndarray:
    """Quantize an image to its nearest-entry code grid (ties: lowest index)."""
    h, w = img.shape[:2]
    if h % cb.patch_h or w % cb.patch_w:
        raise ValueError(
            f"image {h}x{w} not divisible by patch {cb.patch_h}x{cb.patch_w}")
    patches = image_patches(img, cb.patch_h, cb.patch_w)
    d2 = _pairwise_sq_dist(patches, cb.entries.astype(np.float64))
    codes = np.argmin(d2, axis=1).astype(np.int32)
    return codes.reshape(h // cb.patch_h, w // cb.patch_w)


def decode(codes: np.ndarray, cb: Codebook) -> np.ndarray:
    """Expand a code grid back to pixels; MASK entries are an error."""
    codes = np.asarray(codes)
    if codes.ndim != 2:
        raise ValueError(f"code grid must be 2-D, got shape {codes.shape}")
    if np.any(codes < 0) or np.any(codes >= cb.num_entries):
        bad = int(np.count_nonzero((codes < 0) | (codes >= cb.num_entries)))
        raise ValueError(f"code grid contains {bad} MASK/out-of-range entries")
    rows, cols = codes.shape
    patches = cb.entries.astype(np.float64)[codes.reshape(-1)]
    img = patches.reshape(rows, cols, cb.patch_h, cb.patch_w, 3)
    img = img.transpose(0, 2, 1, 3, 4).reshape(rows * cb.patch_h, cols * cb.patch_w, 3)
    return np.clip(img, 0.0, 1.0)


def save_codebook(cb: Codebook, path) -> None:
    """Write magic + (K, patch_h, patch_w) header + little-endian f32 entries."""
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<III", cb.num_entries, cb.patch_h, cb.patch_w))
        f.write(np.ascontiguousarray(cb.entries, dtype="<f4").tobytes())


def load_codebook(path) -> Codebook:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[:4] != MAGIC:
        raise ValueError(f"{path}: not a codebook file (bad magic)")
    k, ph, pw = struct.unpack("<III", blob[4:16])
    want = k * ph * pw * 3
    entries = np.frombuffer(blob[16:], dtype="<f4")
    if entries.size != want:
        raise ValueError(
            f"{path}: expected {want} floats for K={k} patch={ph}x{pw}, "
            f"got {entries.size}")
    return Codebook(entries=entries.reshape(k, ph * pw * 3).copy(),
                    patch_h=ph, patch_w=pw)


def format_code_grid(codes: np.ndarray, mask_code: int) -> str:
    """Render a code grid as text rows; the MASK sentinel prints as 'M'."""
    lines = []
    for row in np.asarray(codes):
        lines.append(" ".join("M" if c == mask_code else str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def parse_code_grid(text: str, mask_code: int) -> np.ndarray:
    """Parse the format_code_grid text form back into an int32 grid."""
    rows = []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = []
        for tok in line.split():
            if tok == "M":
                row.append(mask_code)
            else:
                try:
                    val = int(tok)
                except ValueError:
                    raise ValueError(f"line {ln}: bad code token {tok!r}") from None
                if not 0 <= val <= mask_code:
                    raise ValueError(f"line {ln}: code {val} outside [0, {mask_code}]")
                row.append(val)
        rows.append(row)
    if not rows:
        raise ValueError("empty code grid")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged code grid")
    return np.array(rows, dtype=np.int32)
