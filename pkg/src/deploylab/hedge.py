"""The Hedge multiplicative-weights dynamic and its diagnostics.

T_i(X) = X(i) exp{a (CX)_i} / sum_j X(j) exp{a (CX)_j}

with learning-rate schedules, relative-entropy bookkeeping, fixed-point
detection, and numeric checks of the entropy convexity/secant bounds.
"""

import math

import numpy as np

from .games import (DEFAULT_TOL, as_operator, carrier, is_interior,
                    payoff_vector, validate_mixed)

FIXED_POINT_DISPLACEMENT = 1e-14


class LearningRateSchedule:
    """Learning rates a_k; convergence needs a_k -> 0 and sum a_k = inf.

    forms: 'constant' (a_k = c), 'harmonic' (a_k = c/(k+1)),
    'power' (a_k = c/(k+1)**exponent, exponent in (0, 1]).
    """

    def __init__(self, form, c, exponent=1.0):
        if form not in ("constant", "harmonic", "power"):
            raise ValueError("unknown schedule form %r" % (form,))
        if c <= 0:
            raise ValueError("schedule constant must be positive")
        if form == "power" and not (0.0 < exponent <= 1.0):
            raise ValueError("power exponent must lie in (0, 1]")
        self.form = form
        self.c = float(c)
        self.exponent = float(exponent) if form == "power" else 1.0

    def rate(self, k):
        if self.form == "constant":
            return self.c
        if self.form == "harmonic":
            return self.c / (k + 1)
        return self.c / (k + 1) ** self.exponent

    @property
    def vanishes(self):
        """a_k -> 0"""
        return self.form != "constant"

    @property
    def diverges(self):
        """sum a_k = +inf"""
        if self.form == "constant":
            return True
        return self.exponent <= 1.0

    @property
    def convergent_schedule(self):
        return self.vanishes and self.diverges

    def __repr__(self):
        return "LearningRateSchedule(%r, c=%g, exponent=%g)" % (
            self.form, self.c, self.exponent)


def make_schedule(form, c, exponent=1.0):
    return LearningRateSchedule(form, c, exponent)


def hedge_step(op, x, alpha):
    """One application of the Hedge map at learning rate alpha.

    Exponents are shifted by their maximum before exponentiation; the
    shift cancels in the normalization, so the map is unchanged but
    cannot overflow.
    """
    if alpha < 0:
        raise ValueError("learning rate must be nonnegative")
    x = np.asarray(x, dtype=float)
    p = payoff_vector(op, x)
    z = alpha * p
    w = x * np.exp(z - z.max())
    return w / w.sum()


def relative_entropy(p, q):
    """RE(P, Q) = sum over the carrier of P of P(i) ln(P(i)/Q(i))."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if (q[mask] <= 0).any():
        raise ValueError("carrier of p is not contained in carrier of q")
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def is_fixed_point(op, x, tol=DEFAULT_TOL):
    """Fixed points of Hedge: pure strategies and carrier equalizers."""
    x = np.asarray(x, dtype=float)
    supp = sorted(carrier(x, 0.0))
    if len(supp) <= 1:
        return True
    p = payoff_vector(op, x)[supp]
    return bool(p.max() - p.min() <= tol)


class HedgeTrace:
    """Record of a Hedge run.

    iterates holds every record_every-th iterate plus the final one;
    iterate_sum/count always cover the full orbit so the all-window
    average is exact regardless of decimation.
    """

    def __init__(self, record_every=1):
        self.record_every = record_every
        self.iterates = []
        self.iterate_iters = []
        self.rates = []
        self.payoffs = []
        self.re_to_reference = []
        self.stop_reason = None
        self.iterate_sum = None
        self.count = 0

    def _record(self, k, x, rate, payoff, re_ref):
        if self.iterate_sum is None:
            self.iterate_sum = np.zeros_like(x)
        self.iterate_sum += x
        self.count += 1
        if k % self.record_every == 0:
            self.iterates.append(x)
            self.iterate_iters.append(k)
            self.rates.append(rate)
            self.payoffs.append(payoff)
            self.re_to_reference.append(re_ref)

    def _record_final(self, k, x, rate, payoff, re_ref):
        if self.iterate_iters and self.iterate_iters[-1] == k:
            return
        self.iterates.append(x)
        self.iterate_iters.append(k)
        self.rates.append(rate)
        self.payoffs.append(payoff)
        self.re_to_reference.append(re_ref)

    @property
    def final(self):
        return self.iterates[-1]

    def to_csv(self, path):
        """Write iter, alpha, payoff, re_to_reference, x_0..x_{n-1} rows."""
        import csv
        n = len(self.iterates[0])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iter", "alpha", "payoff", "re_to_reference"] +
                       ["x_%d" % i for i in range(n)])
            for k, a, pay, re_, x in zip(self.iterate_iters, self.rates,
                                         self.payoffs, self.re_to_reference,
                                         self.iterates):
                w.writerow([k, repr(a), repr(pay),
                            "" if re_ is None else repr(re_)] +
                           [repr(v) for v in x])


def run_hedge(op, x0, schedule, max_iters=10**6, reference=None, stop_re=None,
              record_every=1, k0=0):
    """Iterate Hedge from an interior start.

    Stops on max_iters, on a fixed point (step displacement below
    1e-14 in the max norm), or when RE(reference, x_k) drops below
    stop_re.  k0 offsets the schedule index so a run can be continued
    in segments.
    """
    op = as_operator(op)
    x = validate_mixed(x0)
    if not is_interior(x):
        raise ValueError("Hedge must start in the relative interior "
                         "(the boundary is invariant)")
    trace = HedgeTrace(record_every=record_every)
    rate = payoff = re_ref = None
    M = op.matrix if op.kind == "linear-matrix" else None
    for k in range(max_iters):
        p = M @ x if M is not None else payoff_vector(op, x)
        payoff = float(x @ p)
        re_ref = None if reference is None else relative_entropy(reference, x)
        rate = schedule.rate(k0 + k)
        trace._record(k0 + k, x, rate, payoff, re_ref)
        if stop_re is not None and re_ref is not None and re_ref < stop_re:
            trace._record_final(k0 + k, x, rate, payoff, re_ref)
            trace.stop_reason = "converged"
            return trace
        z = rate * p
        w = x * np.exp(z - z.max())
        x_next = w / w.sum()
        if np.abs(x_next - x).max() < FIXED_POINT_DISPLACEMENT:
            trace._record_final(k0 + k, x, rate, payoff, re_ref)
            trace.stop_reason = "fixed-point"
            return trace
        x = x_next
    p = M @ x if M is not None else payoff_vector(op, x)
    re_ref = None if reference is None else relative_entropy(reference, x)
    trace._record_final(k0 + max_iters, x, rate, float(x @ p), re_ref)
    trace.stop_reason = "max-iters"
    return trace


def average_iterates(trace, window="all"):
    """Arithmetic mean of trace iterates.

    window='all' uses the exact full-orbit sum; window=('tail', k)
    averages the last k recorded iterates.
    """
    if trace.count == 0 and not trace.iterates:
        raise ValueError("empty trace")
    if window == "all":
        # final recorded iterate may lie beyond the accounted sum
        extra = 1 if trace.iterate_iters and trace.count and \
            trace.iterate_iters[-1] >= trace.count else 0
        total = trace.iterate_sum.copy() if trace.count else np.zeros_like(trace.final)
        cnt = trace.count
        if extra:
            total += trace.final
            cnt += 1
        return total / cnt
    kind, k = window
    if kind != "tail" or k < 1:
        raise ValueError("window must be 'all' or ('tail', k)")
    sel = trace.iterates[-k:]
    if not sel:
        raise ValueError("empty window")
    return np.mean(sel, axis=0)


def check_convexity_bounds(op, x, y, alphas):
    """Numeric check of the entropy convexity and secant bounds.

    Verifies that a |-> RE(y, T_a(x)) has nonnegative second divided
    differences on the grid {0} + alphas, and that for every a

        RE(y, T_a(x)) <= RE(y, x) - a (y - x).Cx + a (e^a - 1) Cbar

    with Cbar = sum_j x(j) (Cx)_j^2.  Also reports the derivative at 0,
    which should equal (x - y).Cx.
    """
    op = as_operator(op)
    x = validate_mixed(x)
    y = validate_mixed(y)
    if not is_interior(x):
        raise ValueError("x must be interior")
    alphas = sorted(float(a) for a in alphas)
    if any(a <= 0 for a in alphas):
        raise ValueError("alphas must be positive")
    if op.bounds is None or op.bounds[0] < 0 or op.bounds[1] > 1:
        raise ValueError("secant bound needs payoffs bounded in [0, 1]")
    p = payoff_vector(op, x)
    cbar = float(np.sum(x * p * p))
    drift = float((y - x) @ p)
    re0 = relative_entropy(y, x)

    grid = [0.0] + alphas
    vals = [re0] + [relative_entropy(y, hedge_step(op, x, a)) for a in alphas]

    second = []
    for i in range(len(grid) - 2):
        a0, a1, a2 = grid[i:i + 3]
        f0, f1, f2 = vals[i:i + 3]
        d1 = (f1 - f0) / (a1 - a0)
        d2 = (f2 - f1) / (a2 - a1)
        second.append(2.0 * (d2 - d1) / (a2 - a0))
    second = np.array(second)

    secant_ok = True
    for a, v in zip(alphas, vals[1:]):
        bound = re0 - a * drift + a * (math.exp(a) - 1.0) * cbar
        if v > bound + 1e-9:
            secant_ok = False
    h = 1e-7
    deriv_fd = (relative_entropy(y, hedge_step(op, x, h)) - re0) / h
    fixed = is_fixed_point(op, x)
    return {
        "alphas": grid,
        "re_values": vals,
        "second_divided_differences": second,
        "convex_ok": bool((second >= -1e-9).all()),
        "strictly_convex": bool(not fixed and (second > 0).all()),
        "is_fixed_point": fixed,
        "secant_ok": secant_ok,
        "cbar": cbar,
        "deriv0_fd": deriv_fd,
        "deriv0_analytic": float((x - y) @ p),
    }


def rescale_to_unit(C):
    """Affine map of a bounded payoff matrix into [0, 1].

    Returns (C0, shift, scale) with C0 = (C + shift) * scale.  Payoff
    gaps scale by `scale`; argmax sets and equilibria are unchanged.
    """
    C = np.asarray(C, dtype=float)
    lo, hi = C.min(), C.max()
    if hi == lo:
        return np.zeros_like(C), -lo, 1.0
    return (C - lo) / (hi - lo), -lo, 1.0 / (hi - lo)
