"""Soft clustering of visual tokens into superpixel tokens.

Tokens live on a 2-D grid. Superpixel centers start as block means of an
``H_t x W_t`` average pooling and are refined by iterating a soft
association between each token and the 3x3 superpixel cells around the
token's home cell. Two association kernels are provided: a scaled
dot-product ("attention") kernel with row softmax and column-normalized
aggregation, and a squared-distance RBF kernel normalized by total
association mass per superpixel.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import tensor as tt
from .errors import ConfigError, ContractError, StarvationWarning
from .tensor import EPS, Tensor

KERNELS = ("attention", "rbf")

# Additive logit offset that drives masked softmax entries to exactly zero.
_MASK_OFFSET = -1e30


@dataclass
class TokenGrid:
    """A batch of tokens plus the 2-D grid geometry they came from."""

    tokens: Tensor  # (B, L, C)
    grid_rows: int
    grid_cols: int
    provenance: str = "vit-tokens"

    def __post_init__(self):
        if self.tokens.ndim != 3:
            raise ContractError(f"tokens must be (B, L, C), got shape {self.tokens.shape}")
        b, l, c = self.tokens.shape
        if b < 1 or c < 1:
            raise ContractError(f"need B >= 1 and C >= 1, got shape {self.tokens.shape}")
        if self.grid_rows * self.grid_cols != l:
            raise ConfigError(
                f"grid {self.grid_rows}x{self.grid_cols} does not cover {l} tokens"
            )

    @property
    def batch(self):
        return self.tokens.shape[0]

    @property
    def count(self):
        return self.tokens.shape[1]

    @property
    def channels(self):
        return self.tokens.shape[2]


@dataclass(frozen=True)
class SuperpixelGeometry:
    grid_rows: int
    grid_cols: int
    cell_rows: int  # H_t
    cell_cols: int  # W_t

    def __post_init__(self):
        if self.grid_rows % self.cell_rows or self.grid_cols % self.cell_cols:
            raise ConfigError(
                f"token grid {self.grid_rows}x{self.grid_cols} is not divisible by "
                f"superpixel cell {self.cell_rows}x{self.cell_cols}"
            )

    @property
    def sp_rows(self):
        return self.grid_rows // self.cell_rows

    @property
    def sp_cols(self):
        return self.grid_cols // self.cell_cols

    @property
    def superpixels(self):
        return self.sp_rows * self.sp_cols


@dataclass
class SuperpixelState:
    """Association map and superpixel tokens after ``iteration`` updates."""

    s: Tensor  # (B, M, C)
    q: Tensor | None  # (B, L, M)
    q_hat: Tensor | None  # (B, L, M)
    geometry: SuperpixelGeometry
    iteration: int


def neighborhood(token_index, geometry):
    """Superpixel indices in the 3x3 block around the token's home cell,
    clamped at the borders (corners see 4, edges 6, interior 9)."""
    if not 0 <= token_index < geometry.grid_rows * geometry.grid_cols:
        raise ContractError(
            f"token index {token_index} outside grid "
            f"{geometry.grid_rows}x{geometry.grid_cols}"
        )
    r, c = divmod(token_index, geometry.grid_cols)
    cr, cc = r // geometry.cell_rows, c // geometry.cell_cols
    out = []
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            nr, nc = cr + dr, cc + dc
            if 0 <= nr < geometry.sp_rows and 0 <= nc < geometry.sp_cols:
                out.append(nr * geometry.sp_cols + nc)
    return out


@lru_cache(maxsize=64)
def _neighborhood_mask(grid_rows, grid_cols, cell_rows, cell_cols):
    geom = SuperpixelGeometry(grid_rows, grid_cols, cell_rows, cell_cols)
    mask = np.zeros((grid_rows * grid_cols, geom.superpixels), dtype=bool)
    for i in range(mask.shape[0]):
        mask[i, neighborhood(i, geom)] = True
    return mask


def neighborhood_mask(geometry):
    """Boolean (L, M) admissibility mask; memberships are fixed by each
    token's initial grid cell and never recomputed across iterations."""
    return _neighborhood_mask(
        geometry.grid_rows, geometry.grid_cols, geometry.cell_rows, geometry.cell_cols
    )


def init_superpixels(tg, cell_rows, cell_cols):
    """Block-mean initialization: S0 is an average pooling of the token
    grid with window == stride == (cell_rows, cell_cols)."""
    geom = SuperpixelGeometry(tg.grid_rows, tg.grid_cols, cell_rows, cell_cols)
    b, _, c = tg.tokens.shape
    grid = tt.reshape(tg.tokens, (b, tg.grid_rows, tg.grid_cols, c))
    pooled = tt.avg_pool2d(grid, (cell_rows, cell_cols))
    s0 = tt.reshape(pooled, (b, geom.superpixels, c))
    return SuperpixelState(s=s0, q=None, q_hat=None, geometry=geom, iteration=0)


def associate_attention(tg, state):
    """One scaled dot-product association update.

    Per token, logits over its admissible superpixels are ``<T_i, S_j> /
    sqrt(C)``; a masked softmax (inadmissible entries exactly zero) gives Q.
    Q-hat renormalizes each column (floor ``1e-12``), and the new centers
    are ``Q_hat^T T``.
    """
    geom = state.geometry
    b, l, c = tg.tokens.shape
    m = geom.superpixels
    mask = neighborhood_mask(geom)

    logits = tt.matmul(tg.tokens, tt.transpose(state.s, (0, 2, 1)))  # (B, L, M)
    logits = tt.mul(logits, 1.0 / np.sqrt(c))
    tt.check_finite(logits, "association logits")
    offsets = Tensor(np.where(mask, 0.0, _MASK_OFFSET))
    q = tt.softmax(tt.add(logits, tt.broadcast_to(offsets, (b, l, m))), axis=2)

    col_sums = tt.sum_(q, axis=1, keepdims=True)  # (B, 1, M)
    q_hat = tt.div(q, tt.broadcast_to(tt.clamp_min(col_sums, EPS), (b, l, m)))
    s_new = tt.matmul(tt.transpose(q_hat, (0, 2, 1)), tg.tokens)
    return SuperpixelState(
        s=s_new, q=q, q_hat=q_hat, geometry=geom, iteration=state.iteration + 1
    )


def associate_rbf(tg, state):
    """One RBF association update: ``Q_ij = exp(-||F_i - S_j||^2)`` on the
    admissible neighborhood, centers re-aggregated as mass-weighted means.

    Superpixels whose total mass falls below ``1e-12`` keep their previous
    center and trigger a :class:`StarvationWarning`.
    """
    geom = state.geometry
    b, l, c = tg.tokens.shape
    m = geom.superpixels
    mask = neighborhood_mask(geom)

    feat_sq = tt.sum_(tt.mul(tg.tokens, tg.tokens), axis=2, keepdims=True)  # (B, L, 1)
    cent_sq = tt.sum_(tt.mul(state.s, state.s), axis=2, keepdims=True)  # (B, M, 1)
    cross = tt.matmul(tg.tokens, tt.transpose(state.s, (0, 2, 1)))  # (B, L, M)
    sq_dist = tt.add(
        tt.sub(
            tt.broadcast_to(feat_sq, (b, l, m)),
            tt.mul(cross, 2.0),
        ),
        tt.broadcast_to(tt.transpose(cent_sq, (0, 2, 1)), (b, l, m)),
    )
    sq_dist = tt.clamp_min(sq_dist, 0.0)
    mask_t = tt.broadcast_to(Tensor(mask.astype(np.float64)), (b, l, m))
    q = tt.mul(tt.exp(tt.mul(sq_dist, -1.0)), mask_t)

    mass = tt.sum_(q, axis=1, keepdims=True)  # (B, 1, M)
    starved = mass.data[:, 0, :] < EPS  # (B, M)
    if starved.any():
        idx = np.argwhere(starved)[0]
        warnings.warn(
            f"superpixel {idx[1]} in batch element {idx[0]} received no association "
            "mass; keeping its previous center",
            StarvationWarning,
            stacklevel=2,
        )
    weighted = tt.matmul(tt.transpose(q, (0, 2, 1)), tg.tokens)  # (B, M, C)
    denom = tt.broadcast_to(tt.transpose(tt.clamp_min(mass, EPS), (0, 2, 1)), (b, m, c))
    s_candidate = tt.div(weighted, denom)
    q_hat = tt.div(q, tt.broadcast_to(tt.clamp_min(mass, EPS), (b, l, m)))

    if starved.any():
        keep = Tensor(np.broadcast_to(starved[:, :, None], (b, m, c)).astype(np.float64))
        s_new = tt.add(
            tt.mul(s_candidate, tt.sub(tt.ones((b, m, c)), keep)),
            tt.mul(state.s, keep),
        )
    else:
        s_new = s_candidate
    return SuperpixelState(
        s=s_new, q=q, q_hat=q_hat, geometry=geom, iteration=state.iteration + 1
    )


def sample_superpixels(tg, cell_rows=2, cell_cols=2, iterations=1, kernel="attention"):
    """Block-mean init followed by ``iterations`` association updates."""
    if kernel not in KERNELS:
        raise ConfigError(f"unknown kernel {kernel!r}, expected one of {KERNELS}")
    if iterations < 1:
        raise ContractError(f"iterations must be >= 1, got {iterations}")
    state = init_superpixels(tg, cell_rows, cell_cols)
    step = associate_attention if kernel == "attention" else associate_rbf
    for _ in range(iterations):
        state = step(tg, state)
    return state


def hard_assignment(state):
    """Per-token argmax superpixel index, as uint32 (B, L)."""
    if state.q is None:
        raise ContractError("state has no association map yet (iteration 0)")
    return state.q.data.argmax(axis=2).astype(np.uint32)
