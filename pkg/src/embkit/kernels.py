"""Compiled inner loops for embedding training.

Single-threaded calls are bit-reproducible: all randomness comes from an
explicit 64-bit LCG state passed in by the caller, and every arithmetic step
is fixed-order.  The loss/gradient primitives here are the exact code paths
the epoch kernels train with, so gradient tests exercise the real thing.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_LCG_MULT = np.uint64(6364136223846793005)
_LCG_ADD = np.uint64(1442695040888963407)
_U11 = np.uint64(11)
_U33 = np.uint64(33)
_INV_2_53 = 1.0 / 9007199254740992.0

_MASK64 = (1 << 64) - 1


def mix64(*parts: int) -> int:
    """Deterministic 64-bit seed mixer (splitmix64 finalizer per part)."""
    x = 0x9E3779B97F4A7C15
    for p in parts:
        x ^= p & _MASK64
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
        x = x ^ (x >> 31)
    return x or 0x9E3779B97F4A7C15


def new_state(*parts: int) -> np.ndarray:
    return np.array([mix64(*parts)], dtype=np.uint64)


@njit(cache=True, nogil=True, inline="always")
def _lcg(state):
    state[0] = state[0] * _LCG_MULT + _LCG_ADD
    return state[0]


@njit(cache=True, nogil=True, inline="always")
def rand_uniform(state):
    """Uniform float64 in [0, 1) from the top 53 bits."""
    return np.float64(_lcg(state) >> _U11) * _INV_2_53


@njit(cache=True, nogil=True, inline="always")
def rand_below(state, n):
    """Uniform int64 in [0, n) from the top 31 bits."""
    return np.int64(_lcg(state) >> _U33) % n


@njit(cache=True, nogil=True, inline="always")
def draw_window(state, ws):
    """Dynamic window size, uniform over [1, ws]."""
    return 1 + rand_below(state, ws)


@njit(cache=True, nogil=True, inline="always")
def token_survives(keep_prob, state):
    """Subsampling decision; keep_prob >= 1 keeps without consuming a draw."""
    return keep_prob >= 1.0 or rand_uniform(state) < keep_prob


@njit(cache=True, nogil=True)
def subsample_survivors(keep_prob, n, state):
    """Count survivors of n i.i.d. subsampling decisions (test hook)."""
    kept = 0
    for _ in range(n):
        if token_survives(keep_prob, state):
            kept += 1
    return kept


@njit(cache=True, nogil=True)
def window_draws(ws, n, state, out):
    """Fill out[:n] with realized dynamic window sizes (test hook)."""
    for k in range(n):
        out[k] = draw_window(state, ws)


@njit(cache=True, nogil=True, inline="always")
def clipped_sigmoid(x):
    # clip keeps exp() finite; saturated pairs contribute ~0 gradient
    if x > 30.0:
        x = 30.0
    elif x < -30.0:
        x = -30.0
    return 1.0 / (1.0 + np.exp(-x))


@njit(cache=True, nogil=True)
def compose_rows_mean(matrix, const_ids, lo, hi, out):
    """out = mean of matrix rows const_ids[lo:hi]; returns the row count."""
    dim = matrix.shape[1]
    k = hi - lo
    for d in range(dim):
        out[d] = 0.0
    for c in range(lo, hi):
        row = const_ids[c]
        for d in range(dim):
            out[d] += matrix[row, d]
    inv = 1.0 / k
    for d in range(dim):
        out[d] *= inv
    return k


@njit(cache=True, nogil=True)
def ns_loss_and_grads(h, out, targets, labels, grad_h, grad_out):
    """Negative-sampling objective for one input vector h against the rows
    out[targets]: loss = -log s(h.v_pos) - sum_neg log s(-h.v_neg).

    Writes d(loss)/dh into grad_h and d(loss)/d(out[targets[s]]) into
    grad_out[s]; returns the loss.
    """
    dim = h.shape[0]
    for d in range(dim):
        grad_h[d] = 0.0
    loss = 0.0
    for s in range(targets.shape[0]):
        t = targets[s]
        dot = 0.0
        for d in range(dim):
            dot += h[d] * out[t, d]
        sig = clipped_sigmoid(dot)
        if labels[s] > 0.5:
            loss += -np.log(sig)
        else:
            loss += -np.log(1.0 - sig)
        g = sig - labels[s]
        for d in range(dim):
            grad_out[s, d] = g * h[d]
            grad_h[d] += g * out[t, d]
    return loss


@njit(cache=True, nogil=True)
def hs_loss_and_grads(hidden, inner, nodes, bits, grad_hidden, grad_inner):
    """Hierarchical-softmax path objective: loss = -sum_t log s((1-2*bit_t) x_t)
    with x_t = hidden . inner[nodes[t]].

    Writes d(loss)/d(hidden) into grad_hidden and d(loss)/d(inner[nodes[t]])
    into grad_inner[t]; returns the loss.
    """
    dim = hidden.shape[0]
    for d in range(dim):
        grad_hidden[d] = 0.0
    loss = 0.0
    for s in range(nodes.shape[0]):
        node = nodes[s]
        dot = 0.0
        for d in range(dim):
            dot += hidden[d] * inner[node, d]
        sig = clipped_sigmoid(dot)
        label = 1.0 - bits[s]
        if label > 0.5:
            loss += -np.log(sig)
        else:
            loss += -np.log(1.0 - sig)
        g = sig - label
        for d in range(dim):
            grad_inner[s, d] = g * hidden[d]
            grad_hidden[d] += g * inner[node, d]
    return loss


@njit(cache=True, nogil=True)
def glove_loss_and_grads(wi, wj, bi, bj, x, x_max, alpha, grad_wi, grad_wj):
    """Weighted-least-squares record objective f(x) (wi.wj + bi + bj - ln x)^2.

    Fills grad_wi/grad_wj; returns (loss, bias gradient), the bias gradient
    being shared by both biases.
    """
    dim = wi.shape[0]
    dot = 0.0
    for d in range(dim):
        dot += np.float64(wi[d]) * np.float64(wj[d])
    if x < x_max:
        f = (x / x_max) ** alpha
    else:
        f = 1.0
    diff = dot + bi + bj - np.log(x)
    c = 2.0 * f * diff
    for d in range(dim):
        grad_wi[d] = c * np.float64(wj[d])
        grad_wj[d] = c * np.float64(wi[d])
    return f * diff * diff, c


@njit(cache=True, nogil=True)
def glove_epoch(
    w_main,
    w_ctx,
    b_main,
    b_ctx,
    acc_wm,
    acc_wc,
    acc_bm,
    acc_bc,
    rec_i,
    rec_j,
    rec_x,
    order,
    k_start,
    k_stop,
    lr,
    x_max,
    alpha,
):
    """AdaGrad sweep over records order[k_start:k_stop]; returns summed loss."""
    dim = w_main.shape[1]
    gwi = np.empty(dim, dtype=np.float64)
    gwj = np.empty(dim, dtype=np.float64)
    loss_sum = 0.0
    for k in range(k_start, k_stop):
        idx = order[k]
        i = np.int64(rec_i[idx])
        j = np.int64(rec_j[idx])
        x = rec_x[idx]
        loss, gb = glove_loss_and_grads(
            w_main[i], w_ctx[j], np.float64(b_main[i]), np.float64(b_ctx[j]),
            x, x_max, alpha, gwi, gwj,
        )
        loss_sum += loss
        for d in range(dim):
            g = gwi[d]
            acc_wm[i, d] += g * g
            w_main[i, d] -= lr * g / np.sqrt(acc_wm[i, d])
            g = gwj[d]
            acc_wc[j, d] += g * g
            w_ctx[j, d] -= lr * g / np.sqrt(acc_wc[j, d])
        acc_bm[i] += gb * gb
        b_main[i] -= lr * gb / np.sqrt(acc_bm[i])
        acc_bc[j] += gb * gb
        b_ctx[j] -= lr * gb / np.sqrt(acc_bc[j])
    return loss_sum


@njit(cache=True, nogil=True)
def sg_epoch(
    tokens,
    offsets,
    s_start,
    s_stop,
    const_ids,
    const_offsets,
    keep_prob,
    table,
    neg,
    vec_in,
    vec_out,
    ws,
    dynamic_window,
    lr0,
    lr_floor,
    processed_base,
    total_planned,
    state,
    max_sent,
):
    """One skip-gram negative-sampling pass over sentences [s_start, s_stop).

    Returns (loss sum, update count, tokens scanned).
    """
    dim = vec_in.shape[1]
    buf = np.empty(max_sent, dtype=np.int32)
    h = np.empty(dim, dtype=np.float64)
    gh = np.empty(dim, dtype=np.float64)
    targets = np.empty(neg + 1, dtype=np.int32)
    labels = np.empty(neg + 1, dtype=np.float64)
    gout = np.empty((neg + 1, dim), dtype=np.float64)
    tsize = table.shape[0]
    loss_sum = 0.0
    n_updates = 0
    scanned = 0
    for s in range(s_start, s_stop):
        lo, hi = offsets[s], offsets[s + 1]
        m = 0
        for t in range(lo, hi):
            wid = tokens[t]
            scanned += 1
            if token_survives(keep_prob[wid], state):
                buf[m] = wid
                m += 1
        if m < 2:
            continue
        for pos in range(m):
            center = buf[pos]
            frac = 1.0 - np.float64(processed_base + scanned) / np.float64(total_planned)
            if frac < lr_floor:
                frac = lr_floor
            lr = lr0 * frac
            b = draw_window(state, ws) if dynamic_window else ws
            lo2 = pos - b
            if lo2 < 0:
                lo2 = 0
            hi2 = pos + b
            if hi2 > m - 1:
                hi2 = m - 1
            clo, chi = const_offsets[center], const_offsets[center + 1]
            for q in range(lo2, hi2 + 1):
                if q == pos:
                    continue
                ctx = buf[q]
                targets[0] = ctx
                labels[0] = 1.0
                nt = 1
                for _ in range(neg):
                    for _attempt in range(8):
                        cand = table[rand_below(state, tsize)]
                        if cand != ctx:
                            targets[nt] = cand
                            labels[nt] = 0.0
                            nt += 1
                            break
                k = compose_rows_mean(vec_in, const_ids, clo, chi, h)
                loss_sum += ns_loss_and_grads(
                    h, vec_out, targets[:nt], labels[:nt], gh, gout
                )
                n_updates += 1
                for si in range(nt):
                    row = targets[si]
                    for d in range(dim):
                        vec_out[row, d] -= lr * gout[si, d]
                scale = lr / k
                for c in range(clo, chi):
                    row = const_ids[c]
                    for d in range(dim):
                        vec_in[row, d] -= scale * gh[d]
    return loss_sum, n_updates, scanned


@njit(cache=True, nogil=True)
def cbow_epoch(
    tokens,
    offsets,
    s_start,
    s_stop,
    const_ids,
    const_offsets,
    keep_prob,
    path_nodes,
    code_bits,
    code_offsets,
    vec_in,
    vec_inner,
    ws,
    dynamic_window,
    lr0,
    lr_floor,
    processed_base,
    total_planned,
    state,
    max_sent,
    max_code,
):
    """One CBoW hierarchical-softmax pass over sentences [s_start, s_stop).

    The hidden vector is the mean over context tokens of each token's own
    composed (word row + n-gram rows) vector.  Returns (loss sum, update
    count, tokens scanned).
    """
    dim = vec_in.shape[1]
    buf = np.empty(max_sent, dtype=np.int32)
    hidden = np.empty(dim, dtype=np.float64)
    hq = np.empty(dim, dtype=np.float64)
    ghid = np.empty(dim, dtype=np.float64)
    ginner = np.empty((max_code, dim), dtype=np.float64)
    loss_sum = 0.0
    n_updates = 0
    scanned = 0
    for s in range(s_start, s_stop):
        lo, hi = offsets[s], offsets[s + 1]
        m = 0
        for t in range(lo, hi):
            wid = tokens[t]
            scanned += 1
            if token_survives(keep_prob[wid], state):
                buf[m] = wid
                m += 1
        if m < 2:
            continue
        for pos in range(m):
            center = buf[pos]
            frac = 1.0 - np.float64(processed_base + scanned) / np.float64(total_planned)
            if frac < lr_floor:
                frac = lr_floor
            lr = lr0 * frac
            b = draw_window(state, ws) if dynamic_window else ws
            lo2 = pos - b
            if lo2 < 0:
                lo2 = 0
            hi2 = pos + b
            if hi2 > m - 1:
                hi2 = m - 1
            n_ctx = hi2 - lo2
            if n_ctx <= 0:
                continue
            for d in range(dim):
                hidden[d] = 0.0
            for q in range(lo2, hi2 + 1):
                if q == pos:
                    continue
                ctx = buf[q]
                compose_rows_mean(vec_in, const_ids, const_offsets[ctx], const_offsets[ctx + 1], hq)
                for d in range(dim):
                    hidden[d] += hq[d]
            inv_c = 1.0 / n_ctx
            for d in range(dim):
                hidden[d] *= inv_c
            plo, phi = code_offsets[center], code_offsets[center + 1]
            loss_sum += hs_loss_and_grads(
                hidden, vec_inner, path_nodes[plo:phi], code_bits[plo:phi], ghid, ginner
            )
            n_updates += 1
            for si in range(phi - plo):
                node = path_nodes[plo + si]
                for d in range(dim):
                    vec_inner[node, d] -= lr * ginner[si, d]
            for q in range(lo2, hi2 + 1):
                if q == pos:
                    continue
                ctx = buf[q]
                clo, chi = const_offsets[ctx], const_offsets[ctx + 1]
                scale = lr * inv_c / (chi - clo)
                for c in range(clo, chi):
                    row = const_ids[c]
                    for d in range(dim):
                        vec_in[row, d] -= scale * ghid[d]
    return loss_sum, n_updates, scanned
