"""Bit-level hot kernels: sector enumeration, operator strings, 1-RDM loops.

Configurations are uint64 bitmasks (mode m = bit m). Every kernel exists in
two versions: a numba ``@njit`` one and a vectorized-numpy fallback. The
active backend is chosen at import time; set ``HFDSLAB_DISABLE_NUMBA=1`` to
force the numpy path (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``).

Fermionic sign convention: applying a creation/annihilation operator at mode
m on a configuration picks up (-1)**popcount(bits strictly below m), evaluated
on the intermediate configuration at each step. Operator strings are stored
left-to-right as written in a Hamiltonian term and applied right-to-left.
"""

from __future__ import annotations

import math
import os
from itertools import combinations

import numpy as np

_ONE = np.uint64(1)


def _numba_disabled() -> bool:
    return os.environ.get("HFDSLAB_DISABLE_NUMBA", "").strip().lower() in (
        "1", "true", "yes", "on",
    )


HAVE_NUMBA = False
if not _numba_disabled():
    try:
        from numba import njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay importable
        HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def popcount(masks):
    """Population count of a uint64 scalar or array."""
    return np.bitwise_count(np.asarray(masks, dtype=np.uint64))


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def enumerate_masks_numpy(n_modes: int, n_part: int) -> np.ndarray:
    """All n_modes-bit masks with n_part bits set, ascending."""
    if n_part == 0:
        return np.zeros(1, dtype=np.uint64)
    masks = np.fromiter(
        (sum(1 << m for m in combo) for combo in combinations(range(n_modes), n_part)),
        dtype=np.uint64,
        count=math.comb(n_modes, n_part),
    )
    masks.sort()
    return masks


def build_term_entries_numpy(configs, coeffs, ops_create, ops_mode, ops_len):
    """COO entries of sum_t coeff_t * (operator string t) on a sorted sector.

    Returns (rows, cols, vals) with rows/cols as int64 indices into `configs`.
    Strings that annihilate an empty mode or create on a filled one contribute
    nothing. Number conservation of every term is assumed (the resulting mask
    is always found in `configs`).
    """
    n = configs.size
    col_idx = np.arange(n, dtype=np.int64)
    rows_l, cols_l, vals_l = [], [], []
    for t in range(len(coeffs)):
        mask = configs.copy()
        alive = np.ones(n, dtype=bool)
        par = np.zeros(n, dtype=np.int64)
        for k in range(int(ops_len[t]) - 1, -1, -1):
            bit = _ONE << np.uint64(ops_mode[t, k])
            occ = (mask & bit) != 0
            alive &= occ != bool(ops_create[t, k])
            par += np.bitwise_count(mask & (bit - _ONE))
            mask = np.where(alive, mask ^ bit, mask)
        if not alive.any():
            continue
        tgt = mask[alive]
        rows_l.append(np.searchsorted(configs, tgt).astype(np.int64))
        cols_l.append(col_idx[alive])
        sign = 1.0 - 2.0 * (par[alive] & 1)
        vals_l.append(coeffs[t] * sign)
    if not rows_l:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty.copy(), np.empty(0, dtype=np.complex128)
    return np.concatenate(rows_l), np.concatenate(cols_l), np.concatenate(vals_l)


def logdet_batch_numpy(a: np.ndarray):
    """Complex log-determinants of a (batch, k, k) stack; -inf on singular."""
    sign, logabs = np.linalg.slogdet(a)
    return np.where(np.isfinite(logabs), logabs, -np.inf) + 1j * np.angle(sign)


def scatter_rows_numpy(values: np.ndarray, row_ids: np.ndarray,
                       n_rows: int) -> np.ndarray:
    """sum_b values[b, r, :] into out[row_ids[b, r], :] (complex)."""
    flat = values.reshape(-1, values.shape[-1])
    ids = row_ids.ravel()
    out = np.empty((n_rows, flat.shape[1]), dtype=np.complex128)
    for c in range(flat.shape[1]):
        col = np.ascontiguousarray(flat[:, c])
        out[:, c] = (np.bincount(ids, weights=col.real, minlength=n_rows)
                     + 1j * np.bincount(ids, weights=col.imag, minlength=n_rows))
    return out


def assemble_det_matrices_numpy(phi, chi, occ, hidden) -> np.ndarray:
    """Stack [phi|chi] rows at the occupied modes over hidden-row outputs."""
    n_batch, n_vis = occ.shape
    k = n_vis + chi.shape[1]
    out = np.empty((n_batch, k, k), dtype=np.complex128)
    out[:, :n_vis, :n_vis] = phi[occ]
    if k > n_vis:
        out[:, :n_vis, n_vis:] = chi[occ]
        for r in range(k - n_vis):
            out[:, n_vis + r, :] = hidden[r]
    return out


def inv_ridge_batch_numpy(a: np.ndarray, ridge: float):
    """Batched inverses; pivots below `ridge` in magnitude are lifted.

    Returns (inv, number of matrices that needed the ridge).
    """
    import scipy.linalg as sla

    _, logabs = np.linalg.slogdet(a)
    bad = ~(logabs > -690.0)  # |det| below ~1e-300
    if not bad.any():
        return np.linalg.inv(a), 0
    inv = np.empty_like(a)
    good = ~bad
    if good.any():
        inv[good] = np.linalg.inv(a[good])
    events = 0
    eye = np.eye(a.shape[1], dtype=a.dtype)
    import warnings

    for idx in np.nonzero(bad)[0]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            lu, piv = sla.lu_factor(a[idx], check_finite=False)
        d = np.diagonal(lu).copy()
        small = np.abs(d) < ridge
        if small.any():
            events += 1
            lifted = np.where(d == 0, ridge,
                              d * (ridge / np.maximum(np.abs(d), 1e-300)))
            d = np.where(small, lifted, d)
            lu = lu.copy()
            np.fill_diagonal(lu, d)
        inv[idx] = sla.lu_solve((lu, piv), eye, check_finite=False)
    return inv, events


def one_rdm_numpy(configs, amps, n_modes: int) -> np.ndarray:
    """gamma[i, j] = <v| c_j^dag c_i |v> accumulated over the full sector.

    Moves whose target leaves the sector (e.g. across spin blocks at fixed
    magnetization) contribute exactly zero and are skipped.
    """
    gamma = np.zeros((n_modes, n_modes), dtype=np.complex128)
    occ_bits = [((configs >> np.uint64(m)) & _ONE).astype(bool) for m in range(n_modes)]
    for i in range(n_modes):
        biti = _ONE << np.uint64(i)
        sel = occ_bits[i]
        if not sel.any():
            continue
        src = configs[sel]
        a = amps[sel]
        m1 = src ^ biti
        par_i = np.bitwise_count(src & (biti - _ONE))
        for j in range(n_modes):
            bitj = _ONE << np.uint64(j)
            free = (m1 & bitj) == 0
            if not free.any():
                continue
            m2 = m1[free] | bitj
            par = par_i[free] + np.bitwise_count(m1[free] & (bitj - _ONE))
            sign = 1.0 - 2.0 * (par & 1)
            idx = np.searchsorted(configs, m2)
            idx = np.minimum(idx, configs.size - 1)
            in_sector = configs[idx] == m2
            if not in_sector.any():
                continue
            gamma[i, j] += np.sum(np.conj(amps[idx[in_sector]])
                                  * sign[in_sector] * a[free][in_sector])
    return gamma


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _enumerate_masks_nb(n_modes, n_part, count):
        out = np.empty(count, dtype=np.uint64)
        if n_part == 0:
            out[0] = np.uint64(0)
            return out
        v = np.uint64((1 << n_part) - 1)
        limit = np.uint64(1) << np.uint64(n_modes)
        k = 0
        while v < limit:
            out[k] = v
            k += 1
            if k == count:
                break
            c = v & (np.uint64(0) - v)
            r = v + c
            v = (((r ^ v) >> np.uint64(2)) // c) | r
        return out

    @njit(cache=True)
    def _popcount64(x):
        n = 0
        while x:
            x &= x - np.uint64(1)
            n += 1
        return n

    @njit(cache=True)
    def _apply_term(mask, ops_create, ops_mode, length):
        # returns (alive, new_mask, parity)
        par = 0
        for k in range(length - 1, -1, -1):
            bit = np.uint64(1) << np.uint64(ops_mode[k])
            occ = (mask & bit) != np.uint64(0)
            if occ == (ops_create[k] != 0):
                return False, mask, 0
            par += _popcount64(mask & (bit - np.uint64(1)))
            mask = mask ^ bit
        return True, mask, par

    @njit(cache=True)
    def _count_entries_nb(configs, ops_create, ops_mode, ops_len):
        total = 0
        for ci in range(configs.size):
            for t in range(ops_len.size):
                alive, _, _ = _apply_term(configs[ci], ops_create[t], ops_mode[t], ops_len[t])
                if alive:
                    total += 1
        return total

    @njit(cache=True)
    def _fill_entries_nb(configs, coeffs, ops_create, ops_mode, ops_len, rows, cols, vals):
        p = 0
        for ci in range(configs.size):
            mask0 = configs[ci]
            for t in range(ops_len.size):
                alive, mask, par = _apply_term(mask0, ops_create[t], ops_mode[t], ops_len[t])
                if not alive:
                    continue
                rows[p] = np.searchsorted(configs, mask)
                cols[p] = ci
                vals[p] = coeffs[t] if par % 2 == 0 else -coeffs[t]
                p += 1
        return p

    @njit(cache=True)
    def _one_rdm_nb(configs, amps, n_modes):
        gamma = np.zeros((n_modes, n_modes), dtype=np.complex128)
        for ci in range(configs.size):
            mask = configs[ci]
            a = amps[ci]
            for i in range(n_modes):
                biti = np.uint64(1) << np.uint64(i)
                if (mask & biti) == np.uint64(0):
                    continue
                par_i = _popcount64(mask & (biti - np.uint64(1)))
                m1 = mask ^ biti
                for j in range(n_modes):
                    bitj = np.uint64(1) << np.uint64(j)
                    if (m1 & bitj) != np.uint64(0):
                        continue
                    m2 = m1 | bitj
                    idx = np.searchsorted(configs, m2)
                    if idx >= configs.size or configs[idx] != m2:
                        continue  # target leaves the sector: element is zero
                    par = par_i + _popcount64(m1 & (bitj - np.uint64(1)))
                    if par % 2 == 0:
                        gamma[i, j] += np.conj(amps[idx]) * a
                    else:
                        gamma[i, j] -= np.conj(amps[idx]) * a
        return gamma

    from numba import prange

    @njit(cache=True, parallel=True)
    def _lu_factor_nb(a, ridge):
        # factor every matrix once: honest log-determinants (before the
        # ridge) plus the ridged LU reused by the inverse kernel
        n_batch, k, _ = a.shape
        lu = a.copy()
        piv = np.empty((n_batch, k), dtype=np.int64)
        logdet = np.empty(n_batch, dtype=np.complex128)
        events = 0
        for b in prange(n_batch):
            logabs = 0.0
            ph = 1.0 + 0.0j
            neg = False
            singular = False
            ridged = False
            m = lu[b]
            for c in range(k):
                p = c
                best = abs(m[c, c])
                for r in range(c + 1, k):
                    v = abs(m[r, c])
                    if v > best:
                        best = v
                        p = r
                piv[b, c] = p
                if p != c:
                    for cc in range(k):
                        tmp = m[c, cc]
                        m[c, cc] = m[p, cc]
                        m[p, cc] = tmp
                    neg = not neg
                d = m[c, c]
                ad = abs(d)
                if ad == 0.0:
                    singular = True
                else:
                    logabs += np.log(ad)
                    ph *= d / ad
                if ad < ridge:
                    d = complex(ridge, 0.0) if ad == 0.0 else d * (ridge / ad)
                    m[c, c] = d
                    ridged = True
                inv_d = 1.0 / d
                for r in range(c + 1, k):
                    f = m[r, c] * inv_d
                    m[r, c] = f
                    for cc in range(c + 1, k):
                        m[r, cc] -= f * m[c, cc]
            if singular:
                logdet[b] = complex(-np.inf, 0.0)
            else:
                if neg:
                    ph = -ph
                logdet[b] = complex(logabs, np.angle(ph))
            if ridged:
                events += 1
        return logdet, lu, piv, events

    @njit(cache=True, parallel=True)
    def _lu_inverse_t_nb(lu, piv):
        # rows of the result are the solutions A x = e_j, i.e. inv_t = (A^-1)^T
        n_batch, k, _ = lu.shape
        inv_t = np.empty_like(lu)
        for b in prange(n_batch):
            m = lu[b]
            for j in range(k):
                y = inv_t[b, j]
                for c in range(k):
                    y[c] = 1.0 + 0.0j if c == j else 0.0 + 0.0j
                # all interchanges first: multipliers refer to the final order
                for c in range(k):
                    p = piv[b, c]
                    if p != c:
                        tmp = y[c]
                        y[c] = y[p]
                        y[p] = tmp
                for c in range(k):
                    yc = y[c]
                    if yc != 0.0:
                        for r in range(c + 1, k):
                            y[r] -= m[r, c] * yc
                for c in range(k - 1, -1, -1):
                    acc = y[c]
                    for r in range(c + 1, k):
                        acc -= m[c, r] * y[r]
                    y[c] = acc / m[c, c]
        return inv_t

    @njit(cache=True)
    def _scatter_rows_nb(values, row_ids, out):
        n_batch, n_rows, n_cols = values.shape
        for b in range(n_batch):
            for r in range(n_rows):
                m = row_ids[b, r]
                for c in range(n_cols):
                    out[m, c] += values[b, r, c]
        return out

    @njit(cache=True)
    def _assemble_nb(phi, chi, occ, hidden, out):
        n_batch = out.shape[0]
        n_vis = occ.shape[1]
        k = out.shape[1]
        m_hidden = k - n_vis
        for b in range(n_batch):
            for r in range(n_vis):
                mm = occ[b, r]
                for c in range(n_vis):
                    out[b, r, c] = phi[mm, c]
                for c in range(m_hidden):
                    out[b, r, n_vis + c] = chi[mm, c]
            for r in range(m_hidden):
                for c in range(k):
                    out[b, n_vis + r, c] = hidden[r, b, c]
        return out

    def lu_factor_batch_numba(a: np.ndarray, ridge: float):
        logdet, lu, piv, events = _lu_factor_nb(np.ascontiguousarray(a), ridge)
        return logdet, (lu, piv), int(events)

    def lu_inverse_t_batch_numba(ctx) -> np.ndarray:
        lu, piv = ctx
        return _lu_inverse_t_nb(lu, piv)

    def logdet_batch_numba(a: np.ndarray) -> np.ndarray:
        return lu_factor_batch_numba(a, 0.0)[0]

    def scatter_rows_numba(values, row_ids, n_rows: int) -> np.ndarray:
        out = np.zeros((n_rows, values.shape[2]), dtype=np.complex128)
        return _scatter_rows_nb(values, row_ids, out)

    def assemble_det_matrices_numba(phi, chi, occ, hidden) -> np.ndarray:
        n_batch, n_vis = occ.shape
        k = n_vis + chi.shape[1]
        out = np.empty((n_batch, k, k), dtype=np.complex128)
        if hidden is None:
            hidden = np.empty((0, n_batch, k), dtype=np.complex128)
        return _assemble_nb(phi, chi, occ, hidden, out)

    def enumerate_masks_numba(n_modes: int, n_part: int) -> np.ndarray:
        return _enumerate_masks_nb(n_modes, n_part, math.comb(n_modes, n_part))

    def build_term_entries_numba(configs, coeffs, ops_create, ops_mode, ops_len):
        total = _count_entries_nb(configs, ops_create, ops_mode, ops_len)
        rows = np.empty(total, dtype=np.int64)
        cols = np.empty(total, dtype=np.int64)
        vals = np.empty(total, dtype=np.complex128)
        _fill_entries_nb(configs, coeffs, ops_create, ops_mode, ops_len, rows, cols, vals)
        return rows, cols, vals

    def one_rdm_numba(configs, amps, n_modes: int) -> np.ndarray:
        return _one_rdm_nb(configs, np.ascontiguousarray(amps, dtype=np.complex128), n_modes)


# ---------------------------------------------------------------------------
# backend binding
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    enumerate_masks = enumerate_masks_numba
    build_term_entries = build_term_entries_numba
    one_rdm_accumulate = one_rdm_numba
    logdet_batch = logdet_batch_numba
    scatter_rows = scatter_rows_numba
    assemble_det_matrices = assemble_det_matrices_numba
else:
    enumerate_masks = enumerate_masks_numpy
    build_term_entries = build_term_entries_numpy
    one_rdm_accumulate = one_rdm_numpy
    logdet_batch = logdet_batch_numpy
    scatter_rows = scatter_rows_numpy
    assemble_det_matrices = assemble_det_matrices_numpy


def det_factor(a: np.ndarray, ridge: float):
    """Log-determinants plus an opaque context for the ridged inverses.

    One factorization serves both on the numba backend; the numpy fallback
    defers its LAPACK work to :func:`det_inverse_t`. Inverse values agree
    between backends to rounding, not bitwise (different algorithms).
    """
    if HAVE_NUMBA:
        logdet, ctx, events = lu_factor_batch_numba(a, ridge)
        return logdet, {"lu": ctx, "a": a, "events": events, "ridge": ridge}
    return logdet_batch_numpy(a), {"lu": None, "a": a, "events": None,
                                   "ridge": ridge}


def det_inverse_t(fctx) -> tuple:
    """(transposed ridged inverses, ridge event count) for a det_factor
    context; the transpose is the layout every gradient consumer wants."""
    if fctx["lu"] is not None:
        return lu_inverse_t_batch_numba(fctx["lu"]), fctx["events"]
    inv, events = inv_ridge_batch_numpy(fctx["a"], fctx["ridge"])
    return np.ascontiguousarray(np.swapaxes(inv, 1, 2)), events


def occupation_matrix(configs, n_modes: int) -> np.ndarray:
    """(dim, n_modes) array of +/-1: +1 where the mode is occupied."""
    shifts = np.arange(n_modes, dtype=np.uint64)
    bits = (configs[:, None] >> shifts[None, :]) & _ONE
    return 2.0 * bits.astype(np.float64) - 1.0


def crossing_signs(configs, a_mask: int, n_modes: int) -> np.ndarray:
    """Signs reordering each configuration's modes into (A-block, B-block).

    Parity of pairs (a in A occupied, b in B occupied, b < a); this is the
    permutation sign bringing all A creation operators in front of the B ones
    while keeping ascending order inside each block.
    """
    a_mask = np.uint64(a_mask)
    par = np.zeros(configs.shape, dtype=np.int64)
    for a in range(n_modes):
        bit = _ONE << np.uint64(a)
        if not (a_mask & bit):
            continue
        below_b = (bit - _ONE) & ~a_mask
        occ_a = ((configs & bit) != 0).astype(np.int64)
        par += occ_a * np.bitwise_count(configs & below_b).astype(np.int64)
    return (1 - 2 * (par & 1)).astype(np.float64)
