"""Direct simulation of the billiard inside sum x_i^2/a_i = 1 (float64)."""
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .confocal import cartesian_from_jacobi, jacobi_coordinates
from .errors import (AmbiguousEvent, DegenerateLine, NoTangentDirection, OffBoundary,
                     TangentLine)
from .numeric import to_float

BOUNDARY_TOL = 1e-9
DOUBLE_ROOT_TOL = 1e-6


def _a(family):
    return family.as_floats()


def boundary_residual(family, x):
    return float(np.sum(np.asarray(x) ** 2 / _a(family)) - 1.0)


def reflect(family, point, dir, tol=BOUNDARY_TOL):
    """Specular reflection of ``dir`` at a boundary point."""
    a = _a(family)
    x = np.asarray(point, dtype=float)
    v = np.asarray(dir, dtype=float)
    if abs(np.sum(x * x / a) - 1.0) > tol:
        raise OffBoundary("point is not on the boundary ellipsoid")
    nrm = x / a
    nrm /= np.linalg.norm(nrm)
    out = v - 2.0 * np.dot(v, nrm) * nrm
    return out / np.linalg.norm(out)


def next_impact(family, point, dir):
    """Second intersection of the line point + t*dir with the boundary."""
    a = _a(family)
    x = np.asarray(point, dtype=float)
    v = np.asarray(dir, dtype=float)
    A = np.sum(v * v / a)
    B = np.sum(x * v / a)
    C = np.sum(x * x / a) - 1.0
    disc = max(B * B - A * C, 0.0)
    q = -B - np.copysign(np.sqrt(disc), B)
    t_far = q / A
    t_near = C / q if q != 0 else 0.0
    t = max(t_far, t_near)
    if t < 1e-10:
        raise TangentLine("line meets the boundary only tangentially")
    for _ in range(2):
        y = x + t * v
        f = np.sum(y * y / a) - 1.0
        df = 2.0 * np.sum(y * v / a)
        if df == 0:
            break
        t -= f / df
    return x + t * v


def _prod_except(a, skip):
    out = np.array([1.0])
    for k, ak in enumerate(a):
        if k not in skip:
            out = P.polymul(out, [ak, -1.0])
    return out


def tangency_polynomial(family, point, dir):
    """Cleared tangency condition F(lambda), ascending coefficients.

    F = sum v_i^2 prod_{l != i}(a_l - L) - sum_{i<j} M_ij^2 prod_{l != i,j}(a_l - L)
    with M_ij = x_i v_j - x_j v_i.
    """
    a = _a(family)
    x = np.asarray(point, dtype=float)
    v = np.asarray(dir, dtype=float)
    d = len(a)
    F = np.zeros(d)
    for i in range(d):
        F = P.polyadd(F, v[i] ** 2 * _prod_except(a, {i}))
    for i in range(d):
        for j in range(i + 1, d):
            M = x[i] * v[j] - x[j] * v[i]
            F = P.polysub(F, M * M * _prod_except(a, {i, j}))
    return F


def _cluster(roots, scale):
    """Merge numerically split double roots into their mean."""
    roots = sorted(roots)
    out = []
    i = 0
    while i < len(roots):
        if i + 1 < len(roots) and abs(roots[i + 1] - roots[i]) < DOUBLE_ROOT_TOL * scale:
            m = 0.5 * (roots[i] + roots[i + 1])
            out += [m, m]
            i += 2
        else:
            out.append(roots[i])
            i += 1
    return out


def line_caustics(family, point, dir):
    """Parameters of the d-1 confocal quadrics touched by the line."""
    a = _a(family)
    F = tangency_polynomial(family, point, dir)
    scale = a[-1]
    d = len(a)
    roots = P.polyroots(F[:d]) if len(F) >= d else np.array([])
    if len(roots) != d - 1 or abs(F[d - 1]) < 1e-14 * np.max(np.abs(F)):
        raise DegenerateLine("tangency polynomial loses degree")
    if np.any(np.abs(roots.imag) > DOUBLE_ROOT_TOL * scale):
        re = np.sort(roots.real)
        raise DegenerateLine(f"complex tangency parameters near {re}")
    lam = _cluster(list(roots.real), scale)
    # one Newton step per simple root
    dF = P.polyder(F)
    out = []
    for i, r in enumerate(lam):
        double = (i > 0 and lam[i - 1] == r) or (i + 1 < len(lam) and lam[i + 1] == r)
        if not double:
            dv = P.polyval(r, dF)
            if dv != 0:
                r = r - P.polyval(r, F) / dv
        out.append(r)
    out = np.sort(np.array(out))
    if np.any(np.min(np.abs(out[:, None] - a[None, :]), axis=1) < 1e-9 * scale):
        raise DegenerateLine("line lies in a symmetry hyperplane (focal caustic)")
    return out


def _normal(a, x, lam):
    """Unit normal of the confocal quadric Q_lam through x."""
    g = np.zeros_like(x)
    hit = np.abs(a - lam) < 1e-12 * a[-1]
    if np.any(hit):
        g[np.argmax(hit)] = 1.0
    else:
        g = x / (a - lam)
    return g / np.linalg.norm(g)


def _launch_at(a, alpha, x, lam, signs):
    d = len(a)
    w = np.empty(d)
    for k in range(d):
        num = np.prod(alpha - lam[k])
        den = np.prod([lam[i] - lam[k] for i in range(d) if i != k])
        w[k] = num / den
    scale = np.max(np.abs(w))
    if np.any(w < -1e-10 * scale):
        raise NoTangentDirection("no direction through this point touches every caustic")
    w = np.clip(w, 0.0, None)
    w /= np.sum(w)
    v = np.zeros(d)
    for k in range(d):
        v += signs[k] * np.sqrt(w[k]) * _normal(a, x, lam[k])
    return v / np.linalg.norm(v)


def launch_from_caustics(family, caustics, seed=0):
    """A boundary point and unit inward direction tangent to the caustics.

    ``seed`` is either an integer (Jacobi coordinates and signs drawn from
    a generator) or an explicit boundary point.  At a point with Jacobi
    coordinates lam the tangent directions satisfy
    (v . n_k)^2 proportional to prod_j(alpha_j - lam_k) / prod_{i != k}(lam_i - lam_k)
    where n_k is the unit normal of Q_{lam_k}.
    """
    a = _a(family)
    alpha = np.array([to_float(x) for x in caustics.alpha])
    b = np.array([0.0] + [to_float(x) for x in caustics.b])
    d = len(a)
    if isinstance(seed, (int, np.integer)):
        rng = np.random.default_rng(int(seed))
        lam = np.zeros(d)
        for k in range(1, d):
            lo, hi = b[2 * k], b[2 * k + 1]
            lam[k] = lo if lo == hi else lo + (hi - lo) * rng.uniform(0.05, 0.95)
        x = cartesian_from_jacobi(family, lam, rng.choice([-1.0, 1.0], size=d))
        signs = np.concatenate([[-1.0], rng.choice([-1.0, 1.0], size=d - 1)])
    else:
        x = np.asarray(seed, dtype=float)
        if abs(np.sum(x * x / a) - 1.0) > BOUNDARY_TOL:
            raise OffBoundary("seed point is not on the boundary")
        lam = _jacobi_on_boundary(a, x)
        signs = np.concatenate([[-1.0], np.ones(d - 1)])
    v = _launch_at(a, alpha, x, lam, signs)
    got = line_caustics(family, x, v)
    if np.max(np.abs(got - np.sort(alpha))) > 1e-9 * max(1.0, a[-1]):
        raise NoTangentDirection(f"round trip mismatch: {got} vs {alpha}")
    return x, v


def _jacobi_on_boundary(a, x):
    """Jacobi coordinates of a boundary point, tolerating zero coordinates."""
    coef = np.array([1.0])
    for ai in a:
        coef = P.polymul(coef, [ai, -1.0])
    for i, ai in enumerate(a):
        term = np.array([1.0])
        for k, ak in enumerate(a):
            if k != i:
                term = P.polymul(term, [ak, -1.0])
        coef = P.polysub(coef, x[i] ** 2 * term)
    lam = np.sort(P.polyroots(coef).real)
    lam[0] = 0.0
    return lam


@dataclass
class Trajectory:
    impacts: np.ndarray
    directions: np.ndarray
    caustic_params: np.ndarray
    closed: bool
    closure_error: float
    period: int = None
    winding: list = field(default=None)

    def segments(self):
        n = self.period if self.closed else len(self.directions)
        return [(self.impacts[i], self.directions[i], self.impacts[i + 1]) for i in range(n)]

    def to_dict(self):
        return {
            "impacts": self.impacts.tolist(),
            "directions": self.directions.tolist(),
            "caustics": self.caustic_params.tolist(),
            "closed": bool(self.closed),
            "closure_error": float(self.closure_error),
            "period": self.period,
            "winding": self.winding,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(np.array(data["impacts"]), np.array(data["directions"]),
                   np.array(data["caustics"]), data["closed"], data["closure_error"],
                   data["period"], data.get("winding"))

    def to_csv(self):
        d = self.impacts.shape[1]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bounce_index"] + [f"x{i + 1}" for i in range(d)] + [f"v{i + 1}" for i in range(d)])
        for k, (x, v) in enumerate(zip(self.impacts, self.directions)):
            w.writerow([k] + [repr(float(t)) for t in x] + [repr(float(t)) for t in v])
        return buf.getvalue()


def trace(family, point, dir, n_max=200, closure_tol=1e-8):
    """Bounce until the start state recurs or n_max impacts have occurred."""
    x0 = np.asarray(point, dtype=float)
    v0 = np.asarray(dir, dtype=float)
    v0 = v0 / np.linalg.norm(v0)
    impacts, dirs, caus = [x0], [v0], []
    x, v = x0, v0
    closed, err, period = False, np.inf, None
    for k in range(1, n_max + 1):
        caus.append(line_caustics(family, x, v))
        x = next_impact(family, x, v)
        v = reflect(family, x, v)
        impacts.append(x)
        e = np.linalg.norm(x - x0) + np.linalg.norm(v - v0)
        if e < closure_tol:
            closed, err, period = True, e, k
            dirs.append(v)
            break
        err = min(err, e)
        dirs.append(v)
    return Trajectory(np.array(impacts), np.array(dirs), np.array(caus), closed, float(err), period)


def _event_tol(L):
    return 1e-9 * L


def _split_level_count(family, caustics, traj, beta, delta=1e-6, laps=200):
    """Winding at a double caustic level, as an ergodic average.

    On a trajectory whose caustic is double, lambda_j is constant and the
    event count is undefined.  The count is taken from the nearby
    trajectory through the same start point tangent to Q_{beta(1-delta)}
    and Q_{beta(1+delta)}: its event frequency over many laps converges
    to m_j / m_0.
    """
    a = _a(family)
    x, v = traj.impacts[0], traj.directions[0]
    alpha = np.array([to_float(t) for t in caustics.alpha])
    split = [i for i in range(len(alpha)) if alpha[i] == beta]
    alpha[split[0]] = beta * (1 - delta)
    alpha[split[1]] = beta * (1 + delta)
    lam = _jacobi_on_boundary(a, x)
    signs = [np.sign(np.dot(v, _normal(a, x, l))) or 1.0 for l in lam]
    w = _launch_at(a, alpha, x, lam, signs)
    low = beta * (1 - delta)
    n = traj.period
    events = 0
    p = x
    for _ in range(laps * n):
        q = next_impact(family, p, w)
        seg = q - p
        L = np.linalg.norm(seg)
        u = seg / L
        t = -np.sum(p * u / (a - low)) / np.sum(u * u / (a - low))
        events += 0 < t < L
        w = reflect(family, q, w)
        p = q
    ratio = events / laps
    m = int(round(ratio))
    if abs(ratio - m) > 0.25:
        raise AmbiguousEvent(f"split-caustic average {ratio} is not close to an integer")
    return m


def count_winding(traj, caustics):
    """Empirical winding numbers m_0..m_{d-1} of a closed trajectory.

    m_j counts the points where lambda_{j+1} reaches b_{2j}: tangency
    points with the caustic Q_{b_{2j}} or crossings of the hyperplane
    x_k = 0 when b_{2j} = a_k.  Double caustic levels are handled by
    splitting the caustic (see ``_split_level_count``).
    """
    if not traj.closed:
        raise ValueError("trajectory is not closed")
    family = caustics.family
    a = _a(family)
    d = len(a)
    b = [0.0] + [to_float(x) for x in caustics.b]
    n = traj.period
    m = [n]
    for j in range(1, d):
        beta = b[2 * j]
        kind = caustics.b_kinds[2 * j - 1]
        if kind[0] == "alpha" and b[2 * j + 1] == beta:
            m.append(_split_level_count(family, caustics, traj, beta))
            continue
        count = 0
        for i in range(n):
            x, v = traj.impacts[i], traj.impacts[i + 1] - traj.impacts[i]
            L = np.linalg.norm(v)
            v = v / L
            if kind[0] == "a":
                k = kind[1]
                if v[k] == 0:
                    continue
                t = -x[k] / v[k]
            else:
                num = np.sum(x * v / (a - beta))
                den = np.sum(v * v / (a - beta))
                t = -num / den
            if abs(t) < _event_tol(L) or abs(t - L) < _event_tol(L):
                raise AmbiguousEvent(f"event at an impact point (segment {i}, level b_{2 * j})")
            if 0 < t < L:
                count += 1
        m.append(count)
    traj.winding = m
    return m
