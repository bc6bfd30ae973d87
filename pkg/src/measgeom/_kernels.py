"""Bit-packed tableau kernels (numba).

Layout: ``x`` and ``z`` are ``uint64`` arrays of shape ``(2W, nw)``; bit ``q % 64``
of word ``q // 64`` holds qubit ``q``.  Rows ``0..W-1`` are destabilizers, rows
``W..2W-1`` stabilizers.  ``r`` holds one sign bit per row, for the Hermitian
convention ``(-1)^r * prod_q i^(x_q z_q) X^x_q Z^z_q``.  Destabilizer signs are
carried along but never read.
"""

import numpy as np
from numba import njit, types
from numba.extending import intrinsic

EVEN = np.uint64(0x5555555555555555)
ONE = np.uint64(1)
ZERO = np.uint64(0)
ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


@intrinsic
def _ctpop(typingctx, v):
    sig = types.uint64(types.uint64)

    def codegen(context, builder, signature, args):
        return builder.ctpop(args[0])

    return sig, codegen


@njit(cache=True, inline="always")
def popcount(v):
    return _ctpop(v)


@njit(cache=True)
def rowmul(x, z, r, h, p, nw):
    """Row ``h`` <- row ``p`` * row ``h``, sign included (rows must commute)."""
    e = np.uint64(0)
    for w in range(nw):
        x1 = x[p, w]
        z1 = z[p, w]
        x2 = x[h, w]
        z2 = z[h, w]
        x3 = x1 ^ x2
        z3 = z1 ^ z2
        e += popcount(x1 & z1) + popcount(x2 & z2) + (popcount(z1 & x2) << ONE)
        e -= popcount(x3 & z3)
        x[h, w] = x3
        z[h, w] = z3
    r[h] ^= r[p] ^ np.uint8((e >> ONE) & ONE)


@njit(cache=True)
def rowxor(x, z, h, p, nw):
    for w in range(nw):
        x[h, w] ^= x[p, w]
        z[h, w] ^= z[p, w]


@njit(cache=True, inline="always")
def _anticommutes(x, z, i, wi, sh, px, pz):
    xb = (x[i, wi] >> sh) & ONE
    zb = (z[i, wi] >> sh) & ONE
    return ((xb & pz) ^ (zb & px)) != ZERO


@njit(cache=True)
def measure(x, z, r, W, site, code, coin):
    """Measure single-site Pauli ``code`` (1=X, 2=Z, 3=Y) on ``site``.

    Returns ``(outcome_bit, deterministic)``; outcome ``+1`` is bit 0.  In the
    random branch the outcome bit is ``coin``.
    """
    nw = x.shape[1]
    wi = site >> 6
    sh = np.uint64(site & 63)
    px = np.uint64(code & 1)
    pz = np.uint64((code >> 1) & 1)
    p = -1
    for i in range(W, 2 * W):
        if _anticommutes(x, z, i, wi, sh, px, pz):
            p = i
            break
    if p >= 0:
        for i in range(2 * W):
            if i != p and _anticommutes(x, z, i, wi, sh, px, pz):
                if i >= W:
                    rowmul(x, z, r, i, p, nw)
                else:
                    rowxor(x, z, i, p, nw)
        d = p - W
        for w in range(nw):
            x[d, w] = x[p, w]
            z[d, w] = z[p, w]
            x[p, w] = ZERO
            z[p, w] = ZERO
        r[d] = r[p]
        bit = ONE << sh
        if px:
            x[p, wi] = bit
        if pz:
            z[p, wi] = bit
        r[p] = np.uint8(coin & 1)
        return np.uint8(coin & 1), False
    # deterministic: accumulate the product of stabilizers paired with
    # anticommuting destabilizers into a scratch row
    sx = np.zeros((1, nw), dtype=np.uint64)
    sz = np.zeros((1, nw), dtype=np.uint64)
    sr = np.zeros(1, dtype=np.uint8)
    for i in range(W):
        if _anticommutes(x, z, i, wi, sh, px, pz):
            e = np.uint64(0)
            for w in range(nw):
                x1 = x[i + W, w]
                z1 = z[i + W, w]
                x2 = sx[0, w]
                z2 = sz[0, w]
                x3 = x1 ^ x2
                z3 = z1 ^ z2
                e += popcount(x1 & z1) + popcount(x2 & z2) + (popcount(z1 & x2) << ONE)
                e -= popcount(x3 & z3)
                sx[0, w] = x3
                sz[0, w] = z3
            sr[0] ^= r[i + W] ^ np.uint8((e >> ONE) & ONE)
    return sr[0], True


@njit(cache=True)
def measure_many(x, z, r, W, sites, codes, coins, out_bits, out_det):
    for k in range(sites.size):
        b, d = measure(x, z, r, W, sites[k], codes[k], coins[k])
        out_bits[k] = b
        out_det[k] = d


@njit(cache=True)
def apply_1q(x, z, r, q, out_code, out_sign):
    wi = q >> 6
    sh = np.uint64(q & 63)
    clear = ~(ONE << sh)
    for i in range(x.shape[0]):
        c = ((x[i, wi] >> sh) & ONE) | (((z[i, wi] >> sh) & ONE) << ONE)
        oc = np.uint64(out_code[c])
        x[i, wi] = (x[i, wi] & clear) | ((oc & ONE) << sh)
        z[i, wi] = (z[i, wi] & clear) | (((oc >> ONE) & ONE) << sh)
        r[i] ^= out_sign[c]


@njit(cache=True)
def apply_2q(x, z, r, a, b, out_code, out_sign):
    wa = a >> 6
    sa = np.uint64(a & 63)
    wb = b >> 6
    sb = np.uint64(b & 63)
    ca = ~(ONE << sa)
    cb = ~(ONE << sb)
    for i in range(x.shape[0]):
        c = (((x[i, wa] >> sa) & ONE) | (((z[i, wa] >> sa) & ONE) << ONE)
             | (((x[i, wb] >> sb) & ONE) << np.uint64(2))
             | (((z[i, wb] >> sb) & ONE) << np.uint64(3)))
        oc = np.uint64(out_code[c])
        x[i, wa] = (x[i, wa] & ca) | ((oc & ONE) << sa)
        z[i, wa] = (z[i, wa] & ca) | (((oc >> ONE) & ONE) << sa)
        x[i, wb] = (x[i, wb] & cb) | (((oc >> np.uint64(2)) & ONE) << sb)
        z[i, wb] = (z[i, wb] & cb) | (((oc >> np.uint64(3)) & ONE) << sb)
        r[i] ^= out_sign[c]


@njit(cache=True, inline="always")
def _site_layer_row(x, z, i, nw, m):
    par = ZERO
    for w in range(nw):
        xo = x[i, w]
        zo = z[i, w]
        x[i, w] = (m[0, w] & xo) ^ (m[1, w] & zo)
        z[i, w] = (m[2, w] & xo) ^ (m[3, w] & zo)
        par ^= (m[4, w] & xo) ^ (m[5, w] & zo) ^ (m[6, w] & xo & zo)
    return par


@njit(cache=True, inline="always")
def _rotate_down(x, i, L):
    """Qubit q -> position (q - 1) mod L on the first L bits of row i."""
    lw = (L - 1) >> 6
    lb = np.uint64((L - 1) & 63)
    msys = ALL if lb == np.uint64(63) else ((ONE << (lb + ONE)) - ONE)
    bit0 = x[i, 0] & ONE
    for w in range(lw):
        x[i, w] = (x[i, w] >> ONE) | (x[i, w + 1] << np.uint64(63))
    old = x[i, lw]
    x[i, lw] = ((old & msys) >> ONE) | (bit0 << lb) | (old & ~msys)


@njit(cache=True, inline="always")
def _rotate_up(x, i, L):
    """Inverse of ``_rotate_down``."""
    lw = (L - 1) >> 6
    lb = np.uint64((L - 1) & 63)
    msys = ALL if lb == np.uint64(63) else ((ONE << (lb + ONE)) - ONE)
    top = (x[i, lw] >> lb) & ONE
    old_last = x[i, lw]
    for w in range(lw, 0, -1):
        x[i, w] = (x[i, w] << ONE) | (x[i, w - 1] >> np.uint64(63))
    x[i, 0] = x[i, 0] << ONE
    x[i, 0] |= top
    x[i, lw] = (x[i, lw] & msys) | (old_last & ~msys)


@njit(cache=True)
def apply_brick_layer(x, z, r, L, odd, pre, cz, swap, post):
    """One dressed brickwork layer on the first L qubits of every row.

    Each bond ``(2k, 2k+1)`` of the frame gets: single-qubit gates ``pre``,
    CZ where ``cz`` has bit ``2k`` set, SWAP where ``swap`` has bit ``2k`` set,
    then single-qubit gates ``post``.  Since iSWAP = SWAP . CZ . (S x S), a
    SWAP/iSWAP brickwork is this layer with S folded into ``pre``.  For odd
    layers the frame is the logical chain rotated down by one site.
    """
    nw = x.shape[1]
    for i in range(x.shape[0]):
        if odd:
            _rotate_down(x, i, L)
            _rotate_down(z, i, L)
        par = _site_layer_row(x, z, i, nw, pre)
        for w in range(nw):
            xw = x[i, w]
            zw = z[i, w]
            c = cz[w]
            if c != ZERO:
                xa = xw & EVEN
                xb = (xw >> ONE) & EVEN
                za = zw & EVEN
                zb = (zw >> ONE) & EVEN
                # CZ: za ^= xb, zb ^= xa, sign ^= xa xb (za ^ zb)
                par ^= c & xa & xb & (za ^ zb)
                zw ^= ((xb & c) | ((xa & c) << ONE))
            sw = swap[w]
            if sw != ZERO:
                both = sw | (sw << ONE)
                xw = (xw & ~both) | ((xw & sw) << ONE) | ((xw >> ONE) & sw)
                zw = (zw & ~both) | ((zw & sw) << ONE) | ((zw >> ONE) & sw)
            x[i, w] = xw
            z[i, w] = zw
        par ^= _site_layer_row(x, z, i, nw, post)
        r[i] ^= np.uint8(popcount(par) & ONE)
        if odd:
            _rotate_up(x, i, L)
            _rotate_up(z, i, L)


@njit(cache=True)
def restricted_rank(x, z, W, qmask):
    """GF(2) rank of the stabilizer rows restricted to the qubits in ``qmask``."""
    nw = x.shape[1]
    wx = np.empty((W, nw), dtype=np.uint64)
    wz = np.empty((W, nw), dtype=np.uint64)
    lo = nw
    hi = -1
    for w in range(nw):
        if qmask[w] != ZERO:
            if w < lo:
                lo = w
            hi = w
    if hi < 0:
        return 0
    for i in range(W):
        for w in range(lo, hi + 1):
            wx[i, w] = x[W + i, w] & qmask[w]
            wz[i, w] = z[W + i, w] & qmask[w]
    rank = 0
    for w in range(lo, hi + 1):
        m = qmask[w]
        while m != ZERO and rank < W:
            bit = m & (~m + ONE)
            m ^= bit
            for which in range(2):
                arr = wx if which == 0 else wz
                piv = -1
                for i in range(rank, W):
                    if arr[i, w] & bit:
                        piv = i
                        break
                if piv < 0:
                    continue
                if piv != rank:
                    for u in range(lo, hi + 1):
                        t = wx[piv, u]
                        wx[piv, u] = wx[rank, u]
                        wx[rank, u] = t
                        t = wz[piv, u]
                        wz[piv, u] = wz[rank, u]
                        wz[rank, u] = t
                for i in range(rank + 1, W):
                    if arr[i, w] & bit:
                        for u in range(w, hi + 1):
                            wx[i, u] ^= wx[rank, u]
                            wz[i, u] ^= wz[rank, u]
                rank += 1
    return rank


@njit(cache=True)
def _swap_rows(x, z, r, a, b):
    for w in range(x.shape[1]):
        t = x[a, w]
        x[a, w] = x[b, w]
        x[b, w] = t
        t = z[a, w]
        z[a, w] = z[b, w]
        z[b, w] = t
    t8 = r[a]
    r[a] = r[b]
    r[b] = t8


@njit(cache=True, inline="always")
def _bit(arr, i, q):
    return (arr[i, q >> 6] >> np.uint64(q & 63)) & ONE


@njit(cache=True)
def _stab_mul(x, z, r, W, h, p):
    """Stabilizer h <- p*h, with the dual update of destabilizer p."""
    nw = x.shape[1]
    rowmul(x, z, r, W + h, W + p, nw)
    rowxor(x, z, p, h, nw)


@njit(cache=True)
def _left_end(x, z, i, nw):
    for w in range(nw):
        v = x[i, w] | z[i, w]
        if v != ZERO:
            k = 0
            while not (v >> np.uint64(k)) & ONE:
                k += 1
            return w * 64 + k
    return -1


@njit(cache=True)
def _right_end(x, z, i, nw):
    for w in range(nw - 1, -1, -1):
        v = x[i, w] | z[i, w]
        if v != ZERO:
            k = 63
            while not (v >> np.uint64(k)) & ONE:
                k -= 1
            return w * 64 + k
    return -1


@njit(cache=True)
def clip_gauge(x, z, r, W, left, right):
    """Bring stabilizers to the clipped gauge along the linear qubit order.

    Row operations on stabilizers are mirrored on destabilizers so the
    tableau stays a valid symplectic pairing.  Fills ``left``/``right`` with the
    endpoints of stabilizer ``k`` (row ``W + k``).
    """
    nw = x.shape[1]
    # left pass: row echelon over columns x_0, z_0, x_1, z_1, ...
    rank = 0
    for q in range(W):
        for which in range(2):
            arr = x if which == 0 else z
            piv = -1
            for k in range(rank, W):
                if _bit(arr, W + k, q):
                    piv = k
                    break
            if piv < 0:
                continue
            if piv != rank:
                _swap_rows(x, z, r, W + piv, W + rank)
                _swap_rows(x, z, r, piv, rank)
            for k in range(rank + 1, W):
                if _bit(arr, W + k, q):
                    _stab_mul(x, z, r, W, k, rank)
            rank += 1
    for k in range(W):
        left[k] = _left_end(x, z, W + k, nw)
        right[k] = _right_end(x, z, W + k, nw)
    # right pass: rows sharing a right endpoint are reduced against those
    # with larger left endpoints, which keeps the left condition intact
    order = np.empty(W, dtype=np.int64)
    pivots = np.empty(2, dtype=np.int64)
    pcode = np.empty(2, dtype=np.int64)
    for q in range(W - 1, -1, -1):
        n = 0
        for k in range(W):
            if right[k] == q:
                order[n] = k
                n += 1
        if n == 0:
            continue
        # insertion sort by left endpoint, descending
        for a in range(1, n):
            v = order[a]
            b = a - 1
            while b >= 0 and left[order[b]] < left[v]:
                order[b + 1] = order[b]
                b -= 1
            order[b + 1] = v
        npiv = 0
        for a in range(n):
            k = order[a]
            code = int(_bit(x, W + k, q) | (_bit(z, W + k, q) << ONE))
            if npiv >= 1 and code == pcode[0]:
                _stab_mul(x, z, r, W, k, pivots[0])
                code = 0
            elif npiv == 2 and code == pcode[1]:
                _stab_mul(x, z, r, W, k, pivots[1])
                code = 0
            elif npiv == 2 and code == (pcode[0] ^ pcode[1]):
                _stab_mul(x, z, r, W, k, pivots[0])
                _stab_mul(x, z, r, W, k, pivots[1])
                code = 0
            if code == 0:
                right[k] = _right_end(x, z, W + k, nw)
            else:
                pivots[npiv] = k
                pcode[npiv] = code
                npiv += 1


@njit(cache=True)
def canonical_form(x, z, r, W):
    """Reduced row echelon form of the stabilizer rows (a copy), signs included."""
    nw = x.shape[1]
    cx = x[W:, :].copy()
    cz = z[W:, :].copy()
    cr = r[W:].copy()
    rank = 0
    for q in range(W):
        for which in range(2):
            arr = cx if which == 0 else cz
            piv = -1
            for k in range(rank, W):
                if _bit(arr, k, q):
                    piv = k
                    break
            if piv < 0:
                continue
            if piv != rank:
                _swap_rows(cx, cz, cr, piv, rank)
            for k in range(W):
                if k != rank and _bit(arr, k, q):
                    rowmul(cx, cz, cr, k, rank, nw)
            rank += 1
    return cx, cz, cr


@njit(cache=True)
def commutation_defects(x, z, W):
    """Count symplectic-pairing violations of the full tableau."""
    nw = x.shape[1]
    bad = 0
    for i in range(2 * W):
        for j in range(i + 1, 2 * W):
            acc = ZERO
            for w in range(nw):
                acc ^= (x[i, w] & z[j, w]) ^ (z[i, w] & x[j, w])
            sp = popcount(acc) & ONE
            want = ONE if (j == i + W) else ZERO
            if sp != want:
                bad += 1
    return bad


@njit(cache=True)
def span_projection_ranks(x, z, W, left, right, lo, hi, c_lo, c_hi, r_pos):
    """Ranks used for two-interval entropies on a clipped tableau.

    For every window ``j``, the generators contained in the linear span
    ``[lo[j], hi[j]]`` are restricted to the gap ``[c_lo[j], c_hi[j]]``
    (excluding position ``r_pos``) and then to the gap plus ``r_pos``.
    Returns ``(n_contained, rank_gap, rank_gap_and_r)`` per window; pass
    ``r_pos = -1`` for plain two-interval queries.
    """
    n = lo.size
    out_k = np.zeros(n, dtype=np.int64)
    out_c = np.zeros(n, dtype=np.int64)
    out_cr = np.zeros(n, dtype=np.int64)
    max_cols = 1
    for j in range(n):
        m = c_hi[j] - c_lo[j] + 2
        if m > max_cols:
            max_cols = m
    mw = (2 * max_cols + 63) >> 6
    buf = np.zeros((W, mw), dtype=np.uint64)
    cols = np.empty(max_cols, dtype=np.int64)
    for j in range(n):
        ncol = 0
        for q in range(c_lo[j], c_hi[j] + 1):
            if q != r_pos:
                cols[ncol] = q
                ncol += 1
        n_gap = ncol
        if r_pos >= 0:
            cols[ncol] = r_pos
            ncol += 1
        nb = 2 * ncol
        k = 0
        for g in range(W):
            if left[g] >= lo[j] and right[g] <= hi[j]:
                row = W + g
                for u in range(mw):
                    buf[k, u] = ZERO
                for c in range(ncol):
                    q = cols[c]
                    sh = np.uint64(q & 63)
                    if (x[row, q >> 6] >> sh) & ONE:
                        buf[k, (2 * c) >> 6] |= ONE << np.uint64((2 * c) & 63)
                    if (z[row, q >> 6] >> sh) & ONE:
                        buf[k, (2 * c + 1) >> 6] |= ONE << np.uint64((2 * c + 1) & 63)
                k += 1
        # elimination in column order, gap columns first
        rank = 0
        rank_c = 0
        for b in range(nb):
            wb = b >> 6
            mb = ONE << np.uint64(b & 63)
            piv = -1
            for i in range(rank, k):
                if buf[i, wb] & mb:
                    piv = i
                    break
            if piv < 0:
                if b < 2 * n_gap:
                    rank_c = rank
                continue
            if piv != rank:
                for u in range(mw):
                    t = buf[piv, u]
                    buf[piv, u] = buf[rank, u]
                    buf[rank, u] = t
            for i in range(rank + 1, k):
                if buf[i, wb] & mb:
                    for u in range(mw):
                        buf[i, u] ^= buf[rank, u]
            rank += 1
            if b < 2 * n_gap:
                rank_c = rank
        out_k[j] = k
        out_c[j] = rank_c
        out_cr[j] = rank
    return out_k, out_c, out_cr
