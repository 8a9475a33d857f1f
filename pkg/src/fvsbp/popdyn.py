"""Population dynamics: ensemble-averaged message statistics.

Instead of a concrete graph, a large array of cavity messages represents
the stationary message distribution of a random-graph ensemble (Poisson
degrees with mean ``c``, or ``K``-regular).  One update step draws a
degree, reads that many random population entries as inbound messages,
and writes the resulting outbound messages back to random positions:

* Poisson ensemble: draw a full degree ``d``; each of the ``d`` outbound
  messages uses the other ``d - 1`` inputs.  Since a step writes ``d``
  messages, the stationary input-count distribution is the size-biased
  one, i.e. again Poisson(``c``) per message, as required.  A draw of
  ``d = 0`` writes a single zero-input (leaf) message.
* Regular ensemble: one outbound message from ``K - 1`` inputs.

Thermodynamic estimates sample single-vertex terms at full degree and
edge terms from independent message pairs, weighted ``c/2`` (or ``K/2``)
edges per vertex.  All vertices have unit weight here.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .bp import OBS_COLUMNS, X_MAX, _check_x

ER = "er"
RR = "rr"

MIN_POP = 1000
DMAX = 256  # Poisson draws above this are clamped (probability ~0 for c <= 30)

DEFAULT_POP = 100_000
DEFAULT_BURNIN = 200
DEFAULT_MEASURE = 300


@dataclass
class Population:
    """Message population for one ensemble at one re-weighting value."""
    kind: str
    degree: float
    x: float
    p_empty: np.ndarray
    p_root: np.ndarray
    rng: np.random.Generator

    @property
    def size(self) -> int:
        return self.p_empty.shape[0]


@dataclass
class PdEstimate:
    x: float
    rho: float
    omega: float
    phi: float
    s: float
    rho_err: float
    omega_err: float
    phi_err: float
    s_err: float
    sweeps: int


@dataclass
class EnsembleCurve:
    rows: list[PdEstimate] = field(default_factory=list)

    def __post_init__(self):
        self.rows.sort(key=lambda r: r.x)

    @property
    def xs(self) -> np.ndarray:
        return np.array([r.x for r in self.rows])

    @property
    def rhos(self) -> np.ndarray:
        return np.array([r.rho for r in self.rows])

    @property
    def ss(self) -> np.ndarray:
        return np.array([r.s for r in self.rows])

    def write_csv(self, path) -> None:
        cols = OBS_COLUMNS + ["rho_err", "omega_err", "phi_err", "s_err"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for r in self.rows:
                writer.writerow([r.x, r.rho, r.omega, r.phi, r.s, 1, r.sweeps,
                                 r.rho_err, r.omega_err, r.phi_err, r.s_err])

    @classmethod
    def read_csv(cls, path) -> "EnsembleCurve":
        rows = []
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.append(PdEstimate(
                    x=float(rec["x"]), rho=float(rec["rho"]),
                    omega=float(rec["omega"]), phi=float(rec["phi"]),
                    s=float(rec["s"]), rho_err=float(rec["rho_err"]),
                    omega_err=float(rec["omega_err"]),
                    phi_err=float(rec["phi_err"]), s_err=float(rec["s_err"]),
                    sweeps=int(rec["rounds"])))
        return cls(rows)


@dataclass
class Rho0Result:
    rho0: float
    x_cross: float | None
    crossings: list[tuple[float, float]]
    flagged: bool


def _check_ensemble(kind: str, degree: float) -> None:
    if kind not in (ER, RR):
        raise ValueError(f"ensemble kind must be '{ER}' or '{RR}', got {kind!r}")
    if kind == ER and degree < 0:
        raise ValueError(f"mean degree must be >= 0, got {degree}")
    if kind == RR and (degree != int(degree) or degree < 1):
        raise ValueError(f"regular degree must be a positive integer, got {degree}")


def make_population(kind: str, degree: float, x: float, size: int = DEFAULT_POP,
                    seed: int = 0) -> Population:
    """Fresh population with messages drawn uniformly on the 2-simplex."""
    _check_ensemble(kind, degree)
    x = _check_x(x)
    if size < MIN_POP:
        raise ValueError(f"population size must be >= {MIN_POP}, got {size}")
    rng = np.random.default_rng(seed)
    pts = rng.dirichlet((1.0, 1.0, 1.0), size=size)
    return Population(kind=kind, degree=degree, x=x,
                      p_empty=np.ascontiguousarray(pts[:, 0]),
                      p_root=np.ascontiguousarray(pts[:, 1]), rng=rng)


def _cavity_out(ex: float, avs, bvs) -> tuple[float, float]:
    prod, ssum = 1.0, 0.0
    for av, bv in zip(avs, bvs):
        ssum = ssum * av + bv * prod
        prod *= av
    z = 1.0 + ex * (prod + ssum)
    return 1.0 / z, ex * prod / z


def pd_step(pop: Population) -> Population:
    """One population update step (in place; the population is returned)."""
    ex = math.exp(pop.x)
    q0, qr = pop.p_empty, pop.p_root
    size = pop.size
    if pop.kind == ER:
        d = int(pop.rng.poisson(pop.degree))
        if d == 0:
            t = int(pop.rng.integers(size))
            q0[t], qr[t] = 1.0 / (1.0 + ex), ex / (1.0 + ex)
            return pop
        srcs = pop.rng.integers(size, size=d)
        avs = [q0[r] + qr[r] for r in srcs]
        bvs = [1.0 - q0[r] for r in srcs]
        outs = []
        for skip in range(d):
            sub_a = [avs[u] for u in range(d) if u != skip]
            sub_b = [bvs[u] for u in range(d) if u != skip]
            outs.append(_cavity_out(ex, sub_a, sub_b))
        for t, (nq0, nqr) in zip(pop.rng.integers(size, size=d), outs):
            q0[t], qr[t] = nq0, nqr
    else:
        k = int(pop.degree) - 1
        srcs = pop.rng.integers(size, size=k) if k else []
        nq0, nqr = _cavity_out(ex, [q0[r] + qr[r] for r in srcs],
                               [1.0 - q0[r] for r in srcs])
        t = int(pop.rng.integers(size))
        q0[t], qr[t] = nq0, nqr
    return pop


@njit(cache=True)
def _poisson_inv(lam):  # pragma: no cover
    u = np.random.random()
    p = np.exp(-lam)
    f = p
    k = 0
    while u > f and k < 500:
        k += 1
        p *= lam / k
        f += p
    return k


@njit(cache=True)
def _pd_kernel(q0, qr, x, is_er, degree, burn, meas, nv, ne, seed):  # pragma: no cover
    np.random.seed(seed)
    size = q0.shape[0]
    ex = np.exp(x)
    leaf0 = 1.0 / (1.0 + ex)
    leafr = ex / (1.0 + ex)
    a = np.empty(DMAX)
    b = np.empty(DMAX)
    pa = np.empty(DMAX + 1)
    ps = np.empty(DMAX + 1)
    sa = np.empty(DMAX + 1)
    ss = np.empty(DMAX + 1)
    rho_t = np.empty(meas)
    phi_t = np.empty(meas)
    kreg = int(degree)
    for sweep in range(burn + meas):
        for _ in range(size):
            if is_er:
                d = _poisson_inv(degree)
                if d == 0:
                    t = np.random.randint(size)
                    q0[t] = leaf0
                    qr[t] = leafr
                    continue
                if d > DMAX:
                    d = DMAX
                for u in range(d):
                    r = np.random.randint(size)
                    a[u] = q0[r] + qr[r]
                    b[u] = 1.0 - q0[r]
                pa[0] = 1.0
                ps[0] = 0.0
                for u in range(d):
                    pa[u + 1] = pa[u] * a[u]
                    ps[u + 1] = ps[u] * a[u] + b[u] * pa[u]
                sa[d] = 1.0
                ss[d] = 0.0
                for u in range(d - 1, -1, -1):
                    sa[u] = sa[u + 1] * a[u]
                    ss[u] = ss[u + 1] * a[u] + b[u] * sa[u + 1]
                for u in range(d):
                    prod = pa[u] * sa[u + 1]
                    ssum = ps[u] * sa[u + 1] + pa[u] * ss[u + 1]
                    z = 1.0 + ex * (prod + ssum)
                    t = np.random.randint(size)
                    q0[t] = 1.0 / z
                    qr[t] = ex * prod / z
            else:
                prod = 1.0
                ssum = 0.0
                for _u in range(kreg - 1):
                    r = np.random.randint(size)
                    av = q0[r] + qr[r]
                    bv = 1.0 - q0[r]
                    ssum = ssum * av + bv * prod
                    prod *= av
                z = 1.0 + ex * (prod + ssum)
                t = np.random.randint(size)
                q0[t] = 1.0 / z
                qr[t] = ex * prod / z
        if sweep >= burn:
            phiv = 0.0
            q0sum = 0.0
            for _s in range(nv):
                if is_er:
                    d = _poisson_inv(degree)
                    if d > DMAX:
                        d = DMAX
                else:
                    d = kreg
                prod = 1.0
                ssum = 0.0
                for _u in range(d):
                    r = np.random.randint(size)
                    av = q0[r] + qr[r]
                    bv = 1.0 - q0[r]
                    ssum = ssum * av + bv * prod
                    prod *= av
                z = 1.0 + ex * (prod + ssum)
                phiv += np.log(z) / x
                q0sum += 1.0 / z
            phie = 0.0
            for _s in range(ne):
                p1 = np.random.randint(size)
                p2 = np.random.randint(size)
                q0a, qra = q0[p1], qr[p1]
                q0b, qrb = q0[p2], qr[p2]
                val = q0a * q0b + (1.0 - q0a) * (q0b + qrb) \
                    + (1.0 - q0b) * (q0a + qra)
                phie += np.log(val) / x
            mi = sweep - burn
            rho_t[mi] = 1.0 - q0sum / nv
            phi_t[mi] = phiv / nv - (degree / 2.0) * phie / ne
    return rho_t, phi_t


def pd_run(kind: str, degree: float, x: float, pop_size: int = DEFAULT_POP,
           sweeps_burnin: int = DEFAULT_BURNIN,
           sweeps_measure: int = DEFAULT_MEASURE, seed: int = 0,
           samples_per_sweep: int | None = None) -> PdEstimate:
    """Burn in a population, then measure ensemble observables.

    One sweep is ``pop_size`` update steps.  After each measurement sweep
    the vertex and edge free-entropy terms are sampled
    ``samples_per_sweep`` times (default ``max(1000, pop_size // 10)``);
    standard errors come from the spread of per-sweep means.
    """
    _check_ensemble(kind, degree)
    x = _check_x(x, positive=True)
    if pop_size < MIN_POP:
        raise ValueError(f"population size must be >= {MIN_POP}, got {pop_size}")
    if sweeps_burnin < 1 or sweeps_measure < 2:
        raise ValueError("need sweeps_burnin >= 1 and sweeps_measure >= 2")
    ns = samples_per_sweep or max(1000, pop_size // 10)
    pop = make_population(kind, degree, x, pop_size, seed)
    rho_t, phi_t = _pd_kernel(pop.p_empty, pop.p_root, x, kind == ER,
                              float(degree), sweeps_burnin, sweeps_measure,
                              ns, ns, seed)
    s_t = x * (phi_t - rho_t)  # unit weights: omega == rho
    root = math.sqrt(sweeps_measure)
    return PdEstimate(
        x=x, rho=float(rho_t.mean()), omega=float(rho_t.mean()),
        phi=float(phi_t.mean()), s=float(s_t.mean()),
        rho_err=float(rho_t.std(ddof=1)) / root,
        omega_err=float(rho_t.std(ddof=1)) / root,
        phi_err=float(phi_t.std(ddof=1)) / root,
        s_err=float(s_t.std(ddof=1)) / root,
        sweeps=sweeps_measure)


def extract_rho0(curve: EnsembleCurve) -> Rho0Result:
    """Occupation density where the entropy crosses zero.

    Interpolates linearly in (rho, s) at each sign change of s along the
    x-sorted curve.  With several crossings the largest-rho one is used
    and the result is flagged.  If s stays positive the density at the
    largest x is returned (the curve's endpoint estimate).
    """
    if not curve.rows:
        raise ValueError("empty curve")
    xs, rhos, ss = curve.xs, curve.rhos, curve.ss
    crossings: list[tuple[float, float]] = []
    for t in range(len(xs) - 1):
        s0, s1 = ss[t], ss[t + 1]
        if s0 == 0.0:
            crossings.append((float(xs[t]), float(rhos[t])))
        elif s0 * s1 < 0.0:
            frac = s0 / (s0 - s1)
            crossings.append((float(xs[t] + frac * (xs[t + 1] - xs[t])),
                              float(rhos[t] + frac * (rhos[t + 1] - rhos[t]))))
    if ss[-1] == 0.0:
        crossings.append((float(xs[-1]), float(rhos[-1])))
    if not crossings:
        if np.all(ss > 0):
            return Rho0Result(rho0=float(rhos[-1]), x_cross=None,
                              crossings=[], flagged=False)
        raise ValueError("entropy is negative over the whole curve; "
                         "extend the grid to smaller x")
    best = max(crossings, key=lambda c: c[1])
    return Rho0Result(rho0=best[1], x_cross=best[0], crossings=crossings,
                      flagged=len(crossings) > 1)
