# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled classification kernel for the closed-form built-ins.

This module is the compiled twin of the pure-Python classification path:
``orbit`` mirrors ``escape.compute_orbit``, ``compare`` mirrors the
level test, and ``classify_block`` mirrors per-cell ``escape.max_level``
calls, statement for statement.  Bit-identical results rest on three
conventions shared with ``functions.py`` and ``magnitude.py``:

* only libm calls (``math`` in CPython wraps the same libm; ``hypot``
  and ``**`` are avoided on both sides),
* identical expression shapes, so the operation order matches,
* the extension is compiled with contraction off, so no FMA sneaks in.

Everything here assumes a kernel id in 1..4; the series-based functions
never reach this module.
"""

from libc.math cimport (
    atan2, cos, cosh, exp, fabs, log, log1p, pow, sin, sinh, sqrt,
)
from libc.stdint cimport int64_t
from libc.stdlib cimport free, malloc

from fastescape.magnitude import LOG_OVERFLOW as _log_overflow

BACKEND = "compiled"

# mirrors magnitude.py / functions.py module constants
cdef double OVERFLOW = 1e300
cdef double LOG_OVERFLOW = _log_overflow
cdef double LN2 = 0.6931471805599453
cdef double LN4 = 1.3862943611198906
cdef double PI = 3.141592653589793
cdef double POLAR_DIRECT = 705.0

cdef double QC[8]
QC[0] = 1.0
QC[1] = 1.0 / 24.0
QC[2] = 1.0 / 40320.0
QC[3] = 1.0 / 479001600.0
QC[4] = 1.0 / 20922789888000.0
QC[5] = 1.0 / 2432902008176640000.0
QC[6] = 1.0 / 620448401733239439360000.0
QC[7] = 1.0 / 304888344611713860501504000000.0


cdef struct StepOut:
    int status          # 0: value in (vx, vy); 1: overflow signal
    double vx
    double vy
    int64_t sd          # signal tower depth
    double sv           # signal mantissa
    bint has_phase
    double phase


cdef inline double safe_abs_c(double x, double y) noexcept nogil:
    cdef double ax = fabs(x)
    cdef double ay = fabs(y)
    cdef double t
    if ay > ax:
        t = ax
        ax = ay
        ay = t
    if ax == 0.0:
        return 0.0
    t = ay / ax
    return ax * sqrt(1.0 + t * t)


cdef inline void norm_pair(int64_t d, double v, int64_t* od, double* ov) noexcept nogil:
    while v >= OVERFLOW:
        v = log(v)
        d += 1
    while d > 0 and v < LOG_OVERFLOW:
        v = exp(v)
        d -= 1
    od[0] = d
    ov[0] = v


cdef inline void from_log_c(double lx, int64_t* od, double* ov) noexcept nogil:
    if lx >= LOG_OVERFLOW:
        norm_pair(1, lx, od, ov)
    else:
        norm_pair(0, exp(lx), od, ov)


# ---------------------------------------------------------------------------
# step functions (functions.py _exp_step .. _sinh_sq_step)

cdef inline StepOut exp_step_c(double x, double y) noexcept nogil:
    cdef StepOut o
    cdef double e
    if x >= LOG_OVERFLOW:
        o.status = 1
        from_log_c(x, &o.sd, &o.sv)
        o.has_phase = True
        o.phase = y
        return o
    e = exp(x)
    o.status = 0
    o.vx = e * cos(y)
    o.vy = e * sin(y)
    return o


cdef inline StepOut cosh_sq_step_c(double x, double y) noexcept nogil:
    cdef StepOut o
    cdef double ax = fabs(x)
    cdef double w, logabs, a, b
    if ax >= 346.0:
        w = exp(-2.0 * ax) * (2.0 * cos(2.0 * y) + exp(-2.0 * ax))
        logabs = 2.0 * (ax - LN2) + log1p(w)
        if logabs >= LOG_OVERFLOW:
            o.status = 1
            from_log_c(logabs, &o.sd, &o.sv)
            o.has_phase = True
            o.phase = 2.0 * y if x >= 0.0 else -2.0 * y
            return o
    a = cosh(x) * cos(y)
    b = sinh(x) * sin(y)
    o.status = 0
    o.vx = a * a - b * b
    o.vy = 2.0 * a * b
    return o


cdef inline StepOut quarter_step_c(double x, double y) noexcept nogil:
    cdef StepOut o
    cdef double r = safe_abs_c(x, y)
    cdef double sr, si, tr, t, q, u, v, e1, e2, e4, sa, logabs, phase, ea
    cdef int k
    if r < 1.0:
        sr = QC[7]
        si = 0.0
        for k in range(6, -1, -1):
            tr = sr * x - si * y + QC[k]
            si = sr * y + si * x
            sr = tr
        o.status = 0
        o.vx = sr
        o.vy = si
        return o
    t = 0.25 * atan2(y, x)
    q = pow(r, 0.25)
    u = q * cos(t)
    v = q * sin(t)
    if u >= 690.0:
        e1 = exp(-v - u)
        e2 = exp(v - u)
        e4 = exp(-2.0 * u)
        sr = e1 * cos(u) + e2 * cos(u) + cos(v) + e4 * cos(v)
        si = e1 * sin(u) - e2 * sin(u) + sin(v) - e4 * sin(v)
        sa = safe_abs_c(sr, si)
        if sa == 0.0:
            o.status = 0
            o.vx = 0.0
            o.vy = 0.0
            return o
        logabs = u - LN4 + log(sa)
        phase = atan2(si, sr)
        if logabs >= LOG_OVERFLOW:
            o.status = 1
            from_log_c(logabs, &o.sd, &o.sv)
            o.has_phase = True
            o.phase = phase
            return o
        ea = exp(logabs)
        o.status = 0
        o.vx = ea * cos(phase)
        o.vy = ea * sin(phase)
        return o
    o.status = 0
    o.vx = 0.5 * (cos(u) * cosh(v) + cosh(u) * cos(v))
    o.vy = 0.5 * (sinh(u) * sin(v) - sin(u) * sinh(v))
    return o


cdef inline StepOut sinh_sq_step_c(double x, double y) noexcept nogil:
    cdef StepOut o
    cdef double r = safe_abs_c(x, y)
    cdef double lr, t1, t2, t3, m, p1, p2, p3, e1, e2, e3
    cdef double sr, si, sa, logabs, phase, ea
    if (fabs(x) - LN2 >= 688.0) or (r >= 1e149):
        lr = log(r)
        t1 = x - LN2
        t2 = -x - LN2
        t3 = 2.0 * lr
        m = t1
        if t2 > m:
            m = t2
        if t3 > m:
            m = t3
        p1 = y
        p2 = PI - y
        p3 = 2.0 * atan2(y, x)
        e1 = exp(t1 - m)
        e2 = exp(t2 - m)
        e3 = exp(t3 - m)
        sr = e1 * cos(p1) + e2 * cos(p2) + e3 * cos(p3)
        si = e1 * sin(p1) + e2 * sin(p2) + e3 * sin(p3)
        sa = safe_abs_c(sr, si)
        if sa == 0.0:
            o.status = 0
            o.vx = 0.0
            o.vy = 0.0
            return o
        logabs = m + log(sa)
        phase = atan2(si, sr)
        if logabs >= LOG_OVERFLOW:
            o.status = 1
            from_log_c(logabs, &o.sd, &o.sv)
            o.has_phase = True
            o.phase = phase
            return o
        ea = exp(logabs)
        o.status = 0
        o.vx = ea * cos(phase)
        o.vy = ea * sin(phase)
        return o
    o.status = 0
    o.vx = sinh(x) * cos(y) + x * x - y * y
    o.vy = cosh(x) * sin(y) + 2.0 * x * y
    return o


cdef inline StepOut step_c(int kid, double x, double y) noexcept nogil:
    if kid == 1:
        return exp_step_c(x, y)
    if kid == 2:
        return cosh_sq_step_c(x, y)
    if kid == 3:
        return quarter_step_c(x, y)
    return sinh_sq_step_c(x, y)


# ---------------------------------------------------------------------------
# polar tails (functions.py _exp_polar_tail .. _sinh_sq_polar_tail)

cdef inline StepOut exp_polar_tail_c(double log_r, double theta) noexcept nogil:
    cdef StepOut o
    cdef double c = cos(theta)
    if c <= 0.0:
        o.status = 0
        o.vx = 0.0
        o.vy = 0.0
        return o
    o.status = 1
    norm_pair(2, log_r + log(c), &o.sd, &o.sv)
    o.has_phase = False
    o.phase = 0.0
    return o


cdef inline StepOut cosh_sq_polar_tail_c(double log_r, double theta) noexcept nogil:
    cdef StepOut o
    cdef double c = fabs(cos(theta))
    if c == 0.0:
        o.status = 0
        o.vx = 0.0
        o.vy = 0.0
        return o
    o.status = 1
    norm_pair(2, log_r + log(c) + LN2, &o.sd, &o.sv)
    o.has_phase = False
    o.phase = 0.0
    return o


cdef inline StepOut quarter_polar_tail_c(double log_r, double theta) noexcept nogil:
    cdef StepOut o
    cdef double t = 0.25 * theta
    o.status = 1
    norm_pair(2, 0.25 * log_r + log(cos(t)), &o.sd, &o.sv)
    o.has_phase = False
    o.phase = 0.0
    return o


cdef inline StepOut sinh_sq_polar_tail_c(double log_r, double theta) noexcept nogil:
    cdef StepOut o
    cdef double c = fabs(cos(theta))
    cdef double a
    o.status = 1
    if c == 0.0:
        from_log_c(2.0 * log_r, &o.sd, &o.sv)
        o.has_phase = True
        o.phase = PI
        return o
    a = log_r + log(c)
    o.has_phase = False
    o.phase = 0.0
    if a <= POLAR_DIRECT:
        norm_pair(1, exp(a) - LN2, &o.sd, &o.sv)
        return o
    norm_pair(2, a, &o.sd, &o.sv)
    return o


cdef inline StepOut polar_tail_c(int kid, double log_r, double theta) noexcept nogil:
    if kid == 1:
        return exp_polar_tail_c(log_r, theta)
    if kid == 2:
        return cosh_sq_polar_tail_c(log_r, theta)
    if kid == 3:
        return quarter_polar_tail_c(log_r, theta)
    return sinh_sq_polar_tail_c(log_r, theta)


# ---------------------------------------------------------------------------
# max-modulus maps (functions.py _exp_maxmod .. _sinh_sq_maxmod)

cdef inline void exp_maxmod_c(int64_t d, double v, int64_t* od, double* ov) noexcept nogil:
    norm_pair(d + 1, v, od, ov)


cdef inline void cosh_sq_maxmod_c(int64_t d, double v, int64_t* od, double* ov) noexcept nogil:
    if d == 0:
        norm_pair(1, 2.0 * (v - LN2 + log1p(exp(-2.0 * v))), od, ov)
        return
    if d == 1:
        if v <= 705.0:
            norm_pair(1, 2.0 * exp(v) - 2.0 * LN2, od, ov)
            return
        norm_pair(2, v + LN2, od, ov)
        return
    norm_pair(d + 1, v, od, ov)


cdef inline void quarter_maxmod_c(int64_t d, double v, int64_t* od, double* ov) noexcept nogil:
    cdef double q, w, t
    if d == 0:
        q = pow(v, 0.25)
        if q <= 300.0:
            norm_pair(0, 0.5 * (cos(q) + cosh(q)), od, ov)
            return
        w = exp(-q) * (2.0 * cos(q) + exp(-q))
        norm_pair(1, q - LN4 + log1p(w), od, ov)
        return
    if d == 1:
        t = 0.25 * v
        if t <= 705.0:
            norm_pair(1, exp(t) - LN4, od, ov)
            return
        norm_pair(2, t, od, ov)
        return
    if d == 2:
        norm_pair(3, v - LN4, od, ov)
        return
    norm_pair(d + 1, v, od, ov)


cdef inline void sinh_sq_maxmod_c(int64_t d, double v, int64_t* od, double* ov) noexcept nogil:
    cdef double w
    if d == 0:
        if v <= 300.0:
            norm_pair(0, sinh(v) + v * v, od, ov)
            return
        w = 2.0 * v * v * exp(-v) - exp(-2.0 * v)
        norm_pair(1, v - LN2 + log1p(w), od, ov)
        return
    if d == 1:
        if v <= 705.0:
            norm_pair(1, exp(v) - LN2, od, ov)
            return
        norm_pair(2, v, od, ov)
        return
    norm_pair(d + 1, v, od, ov)


cdef inline void maxmod_c(int kid, int64_t d, double v, int64_t* od, double* ov) noexcept nogil:
    if kid == 1:
        exp_maxmod_c(d, v, od, ov)
    elif kid == 2:
        cosh_sq_maxmod_c(d, v, od, ov)
    elif kid == 3:
        quarter_maxmod_c(d, v, od, ov)
    else:
        sinh_sq_maxmod_c(d, v, od, ov)


# ---------------------------------------------------------------------------
# orbit, level test, binary search (escape.py compute_orbit / _compare /
# max_level)

cdef int orbit_c(int kid, double x, double y, int N,
                 int64_t* md, double* mv) noexcept nogil:
    """Fill md/mv[0..N] with the orbit's moduli; return approx_from or -1.

    The closed-form built-ins always have a tower map, so the orbit never
    truncates and the record is total.  State encoding: 0 complex value,
    1 polar (log_r, theta), 2 exact tower, 3 upper-bound tower.
    """
    cdef int n, approx_from = -1, state = 0, tail
    cdef double cx = x, cy = y
    cdef double log_r = 0.0, theta = 0.0, er
    cdef int64_t td = 0, nd = 0
    cdef double tv = 0.0, nv = 0.0
    cdef StepOut s
    norm_pair(0, safe_abs_c(x, y), &md[0], &mv[0])
    for n in range(1, N + 1):
        if state >= 2:
            maxmod_c(kid, td, tv, &td, &tv)
            md[n] = td
            mv[n] = tv
            continue
        tail = 0
        if state == 1:
            state = 0
            if theta == 0.0:
                # on the positive axis f(r) = M(r): continue exactly
                from_log_c(log_r, &nd, &nv)
                maxmod_c(kid, nd, nv, &td, &tv)
                state = 2
                md[n] = td
                mv[n] = tv
                continue
            if log_r <= POLAR_DIRECT:
                er = exp(log_r)
                s = step_c(kid, er * cos(theta), er * sin(theta))
            else:
                s = polar_tail_c(kid, log_r, theta)
                tail = 1
        else:
            s = step_c(kid, cx, cy)
        if s.status == 0:
            if tail == 1 and approx_from < 0:
                # the tail collapsed the point on a bounded ray; from here
                # the moduli are one-sided estimates
                approx_from = n
            cx = s.vx
            cy = s.vy
            norm_pair(0, safe_abs_c(cx, cy), &md[n], &mv[n])
            continue
        # absorb the overflow signal; positive_coefficients holds for
        # every kernel function, so a zero phase continues exactly
        if s.has_phase and s.phase == 0.0:
            state = 2
            td = s.sd
            tv = s.sv
        elif s.has_phase and s.sd == 1:
            state = 1
            log_r = s.sv
            theta = s.phase
        else:
            state = 3
            td = s.sd
            tv = s.sv
            if approx_from < 0:
                approx_from = n
        md[n] = s.sd
        mv[n] = s.sv
    return approx_from


cdef bint compare_c(int64_t* md, double* mv, int64_t* rd, double* rv,
                    int n_rungs, int approx_from, int L, int N,
                    bint* indet_out) noexcept nogil:
    cdef bint indeterminate = False
    cdef bint approx
    cdef int n, k
    for n in range(0, N + 1):
        k = n + L
        if k < 0:
            continue
        approx = approx_from >= 0 and n >= approx_from
        # a kernel orbit never outruns its tower map, so the reference's
        # missing-modulus branch cannot trigger here
        if k >= n_rungs:
            if md[n] >= 1:
                indeterminate = True
                continue
            indet_out[0] = indeterminate
            return False
        if md[n] >= 1 and rd[k] >= 1:
            # tower against tower: counted satisfied, never trusted
            indeterminate = True
            continue
        if md[n] > rd[k] or (md[n] == rd[k] and mv[n] >= rv[k]):
            if approx:
                indeterminate = True
            continue
        if approx:
            indeterminate = True
        indet_out[0] = indeterminate
        return False
    indet_out[0] = indeterminate
    return True


cdef void max_level_c(int64_t* md, double* mv, int64_t* rd, double* rv,
                      int n_rungs, int approx_from, int N,
                      int L_min, int L_max, int none_value,
                      int* level_out, bint* indet_out) noexcept nogil:
    cdef bint member, indet, indet_lo, indet_hi, best
    cdef int lo, hi, mid
    member = compare_c(md, mv, rd, rv, n_rungs, approx_from, L_min, N, &indet_lo)
    if not member:
        level_out[0] = none_value
        indet_out[0] = indet_lo
        return
    member = compare_c(md, mv, rd, rv, n_rungs, approx_from, L_max, N, &indet_hi)
    if member:
        level_out[0] = L_max
        indet_out[0] = indet_hi
        return
    lo = L_min
    hi = L_max
    best = indet_lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        member = compare_c(md, mv, rd, rv, n_rungs, approx_from, mid, N, &indet)
        if member:
            lo = mid
            best = indet
        else:
            hi = mid
    level_out[0] = lo
    indet_out[0] = best


def classify_block(int kernel_id,
                   double[::1] xs, double[::1] ys, int N,
                   int64_t[::1] rung_depth, double[::1] rung_mantissa,
                   int L_min, int L_max, int none_value,
                   int[:, ::1] out_level, unsigned char[:, ::1] out_indet):
    """Classify every (ys[i], xs[j]) cell center into out arrays.

    Callers validate inputs; this only checks the shapes it indexes.
    Releases the GIL, so row blocks can run on a thread pool.
    """
    cdef Py_ssize_t w = xs.shape[0]
    cdef Py_ssize_t h = ys.shape[0]
    cdef int n_rungs = <int> rung_depth.shape[0]
    cdef Py_ssize_t i, j
    cdef int approx_from, lvl
    cdef bint ind
    cdef int64_t* md
    cdef double* mv
    if kernel_id < 1 or kernel_id > 4:
        raise ValueError(f"no compiled kernel for id {kernel_id}")
    if rung_mantissa.shape[0] != rung_depth.shape[0]:
        raise ValueError("rung arrays differ in length")
    if out_level.shape[0] != h or out_level.shape[1] != w:
        raise ValueError("level output shape does not match the grid")
    if out_indet.shape[0] != h or out_indet.shape[1] != w:
        raise ValueError("flag output shape does not match the grid")
    md = <int64_t*> malloc((N + 1) * sizeof(int64_t))
    mv = <double*> malloc((N + 1) * sizeof(double))
    if md == NULL or mv == NULL:
        free(md)
        free(mv)
        raise MemoryError()
    try:
        with nogil:
            for i in range(h):
                for j in range(w):
                    approx_from = orbit_c(kernel_id, xs[j], ys[i], N, md, mv)
                    max_level_c(md, mv,
                                &rung_depth[0], &rung_mantissa[0], n_rungs,
                                approx_from, N, L_min, L_max, none_value,
                                &lvl, &ind)
                    out_level[i, j] = lvl
                    out_indet[i, j] = 1 if ind else 0
    finally:
        free(md)
        free(mv)
