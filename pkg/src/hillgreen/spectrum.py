"""Eigenvalues of the six boundary problems and the relations between them.

The characteristic function of each separated condition is a single entry
of the endpoint state (y1, y1', y2, y2')(L), so eigenvalues come from a
bracketing scan plus Brent refinement.  Periodic and anti-periodic spectra
over an even extension are assembled from the separated spectra of the
half interval, which resolves double roots of the discriminant exactly;
direct root-finding on the discriminant is kept as an independent
cross-check and as the fallback for potentials with no such symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .errors import ResonanceError
from .greens import BoundaryCondition, kernel_value
from .integrator import (DEFAULT_TOL, discriminant, discriminant_derivative,
                         endpoint_scan, fundamental_solutions)
from .potential import Potential

__all__ = [
    "Eigenvalue",
    "Spectrum",
    "characteristic_value",
    "dirichlet_zero_count",
    "discriminant_samples",
    "find_eigenvalues",
    "first_eigenvalue_relations",
    "neumann_extension_residual",
    "stability_intervals",
    "verify_interlacing",
    "verify_spectral_decomposition",
]

DEFAULT_SCAN = 2000
ROOT_XTOL = 1e-12
# Coincident roots from two separated spectra closer than this are one
# double eigenvalue of the coupled problem.
MERGE_RTOL = 1e-7


class Eigenvalue(NamedTuple):
    index: int
    value: float
    multiplicity: int


@dataclass(eq=False)
class Spectrum:
    bc: BoundaryCondition
    length: float
    eigenvalues: tuple[Eigenvalue, ...]
    search_range: tuple[float, float]
    tol: float
    scan_points: int
    audit: dict = field(default_factory=dict)

    def values(self) -> list[float]:
        return [e.value for e in self.eigenvalues]

    def expanded(self) -> list[float]:
        return [e.value for e in self.eigenvalues for _ in range(e.multiplicity)]

    def first(self) -> float | None:
        return self.eigenvalues[0].value if self.eigenvalues else None

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("bc,k,lambda,multiplicity\n")
            for e in self.eigenvalues:
                fh.write(f"{self.bc.value},{e.index},{repr(float(e.value))},{e.multiplicity}\n")


def characteristic_value(p: Potential, lam: float, bc, length: float | None = None,
                         tol: float = DEFAULT_TOL) -> float:
    """Scalar whose zeros in lambda are exactly the eigenvalues of ``bc``."""
    bc = BoundaryCondition.parse(bc)
    L = float(p.domain_length if length is None else length)
    basis = fundamental_solutions(p, lam, L, tol)
    if bc is BoundaryCondition.NEUMANN:
        return basis.y1p_end
    if bc is BoundaryCondition.DIRICHLET:
        return basis.y2_end
    if bc is BoundaryCondition.MIXED1:
        return basis.y1_end
    if bc is BoundaryCondition.MIXED2:
        return basis.y2p_end
    if bc is BoundaryCondition.PERIODIC:
        return basis.discriminant - 2.0
    return basis.discriminant + 2.0


def _char_rows(bc: BoundaryCondition, Y: np.ndarray) -> np.ndarray:
    if bc is BoundaryCondition.NEUMANN:
        return Y[1]
    if bc is BoundaryCondition.DIRICHLET:
        return Y[2]
    if bc is BoundaryCondition.MIXED1:
        return Y[0]
    if bc is BoundaryCondition.MIXED2:
        return Y[3]
    delta = Y[0] + Y[3]
    return delta - 2.0 if bc is BoundaryCondition.PERIODIC else delta + 2.0


def _auto_range(p: Potential, length: float, count: int) -> tuple[float, float]:
    amin, amax = p.sample_bound()
    lo = -amax - 1.0
    hi = ((count + 1.5) * np.pi / length) ** 2 - min(amin, 0.0) + 2.0
    return lo, hi


def _sign_bracket(fine, a: float, b: float, step: float):
    """Shrink-proof bracket: widen up to 3 times until fine() changes sign."""
    fa, fb = fine(a), fine(b)
    for _ in range(3):
        if fa == 0.0:
            return a, a
        if fb == 0.0:
            return b, b
        if np.sign(fa) != np.sign(fb):
            return a, b
        a -= 0.5 * step
        b += 0.5 * step
        fa, fb = fine(a), fine(b)
    return None


def _scan_roots(p: Potential, bc: BoundaryCondition, lo: float, hi: float,
                n_scan: int, length: float, tol: float,
                integrator_tol: float, audit: dict) -> list[float]:
    """Sign-change scan of the characteristic function plus Brent refinement."""
    lams = np.linspace(lo, hi, n_scan + 1)
    f = _char_rows(bc, endpoint_scan(p, lams, length))
    step = (hi - lo) / n_scan

    def fine(lam: float) -> float:
        return characteristic_value(p, lam, bc, length, integrator_tol)

    roots: list[float] = []
    sign = np.sign(f)
    skipped = []
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        bracket = _sign_bracket(fine, lams[i], lams[i + 1], step)
        if bracket is None:
            skipped.append(float(lams[i]))
            continue
        a, b = bracket
        roots.append(a if a == b else brentq(fine, a, b, xtol=max(tol, ROOT_XTOL)))
    for i in np.nonzero(sign == 0)[0]:
        roots.append(float(lams[i]))
    if skipped:
        audit.setdefault("unresolved_brackets", []).extend(skipped)
    return sorted(roots)


# Discriminant noise floor at the refinement tolerance; calibrated against
# exact double roots of the zero potential.
TANGENCY_NOISE = 1e-11
# Pairs closer than this are reported as one double; below the resolution
# of the discriminant anyway and far inside the 1e-5 pairing tolerance.
TANGENCY_SPLIT = 5e-6


def _resolve_tangency(p: Potential, bc: BoundaryCondition, x0: float,
                      step: float, length: float, tol: float,
                      integrator_tol: float):
    """Classify a dip of Delta -+ 2 near zero: touch, narrow gap, or neither.

    A double eigenvalue touches zero without a sign change; a narrow
    instability gap crosses twice inside one scan cell. The dip's extremum
    is pinned through the analytic lambda-derivative of the discriminant,
    so splits far below the scan step are still separated.
    """
    acc = min(integrator_tol, 1e-13)
    shift = -2.0 if bc is BoundaryCondition.PERIODIC else 2.0

    def f(x: float) -> float:
        return discriminant(p, x, length, acc) + shift

    def fprime(x: float) -> float:
        return discriminant_derivative(p, x, length, acc)[1]

    xtol = max(tol, ROOT_XTOL)
    a, b = x0 - step, x0 + step
    fa, fb = f(a), f(b)
    if np.sign(fa) != np.sign(fb):
        return [(brentq(f, a, b, xtol=xtol), 1)], None
    flank = np.sign(fa) or 1.0

    x = x0
    h = 0.25 * step
    curvature = 0.0
    for _ in range(3):
        f0, f1, f2 = f(x - h), f(x), f(x + h)
        denom = f0 - 2.0 * f1 + f2
        if denom == 0.0 or not np.isfinite(denom):
            break
        curvature = abs(denom) / (2.0 * h * h)
        dx = float(np.clip(0.5 * h * (f0 - f2) / denom, -step, step))
        x += dx
        if abs(dx) < 0.05 * h:
            break
    x = min(max(x, a + 1e-6 * step), b - 1e-6 * step)
    fx = f(x)

    if np.sign(fx) == -flank and abs(fx) > 10.0 * TANGENCY_NOISE:
        # the dip crosses zero: two simple band edges inside one cell
        r1 = brentq(f, a, x, xtol=xtol)
        r2 = brentq(f, x, b, xtol=xtol)
        return [(r1, 1), (r2, 1)], None

    double_tol = max(20.0 * TANGENCY_NOISE,
                     curvature * (0.5 * TANGENCY_SPLIT) ** 2)
    da, db = fprime(a), fprime(b)
    if np.sign(da) != np.sign(db) and da != 0.0:
        x_ext = brentq(fprime, a, b, xtol=xtol)
        f_ext = f(x_ext)
        if abs(f_ext) <= double_tol:
            return [(x_ext, 2)], None
        if np.sign(f_ext) == -flank:
            r1 = brentq(f, a, x_ext, xtol=xtol)
            r2 = brentq(f, x_ext, b, xtol=xtol)
            return [(r1, 1), (r2, 1)], None
        return [], (x_ext, f_ext)
    if abs(fx) <= double_tol:
        return [(x, 2)], None
    return [], (float(x), float(fx))


def _coupled_direct(p: Potential, bc: BoundaryCondition, lo: float, hi: float,
                    n_scan: int, length: float, tol: float,
                    integrator_tol: float) -> tuple[list[tuple[float, int]], dict]:
    """Roots of the discriminant equation, tangencies resolved separately."""
    lams = np.linspace(lo, hi, n_scan + 1)
    f = _char_rows(bc, endpoint_scan(p, lams, length))
    step = (hi - lo) / n_scan

    def fine(lam: float) -> float:
        return characteristic_value(p, lam, bc, length, integrator_tol)

    audit: dict = {"method": "direct", "scan_step": step}
    found: list[tuple[float, int]] = []
    used = np.zeros(n_scan + 1, dtype=bool)
    sign = np.sign(f)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        bracket = _sign_bracket(fine, lams[i], lams[i + 1], step)
        if bracket is None:
            audit.setdefault("unresolved_brackets", []).append(float(lams[i]))
            continue
        a, b = bracket
        found.append((a if a == b else brentq(fine, a, b, xtol=max(tol, ROOT_XTOL)), 1))
        used[i] = used[i + 1] = True
    for i in np.nonzero(sign == 0)[0]:
        found.append((float(lams[i]), 1))
        used[max(0, i - 1):i + 2] = True

    absf = np.abs(f)
    for i in range(1, n_scan):
        if used[i - 1] or used[i] or used[i + 1]:
            continue
        if absf[i] < 0.25 and absf[i] <= absf[i - 1] and absf[i] <= absf[i + 1]:
            res, miss = _resolve_tangency(p, bc, float(lams[i]), step, length,
                                          tol, integrator_tol)
            found.extend(res)
            if res:
                audit.setdefault("tangencies", []).append(float(lams[i]))
            if miss is not None:
                audit.setdefault("unconfirmed_tangencies", []).append(miss)
            used[max(0, i - 2):i + 3] = True

    found.sort(key=lambda r: r[0])
    merged: list[tuple[float, int]] = []
    for value, mult in found:
        if merged and abs(value - merged[-1][0]) <= 1e-8 * max(1.0, abs(value)):
            prev_v, prev_m = merged[-1]
            merged[-1] = (0.5 * (prev_v + value), min(2, prev_m + mult))
        else:
            merged.append((value, mult))
    merged = [(v, m) for v, m in merged if lo <= v <= hi]
    return merged, audit


def _coupled_union(p: Potential, bc: BoundaryCondition, lo: float, hi: float,
                   n_scan: int, length: float, tol: float,
                   integrator_tol: float) -> tuple[list[tuple[float, int]], dict]:
    """Coupled spectrum as the union of two separated half-interval spectra.

    Valid when the potential is even about its midpoint; the pairing of
    sources also fixes the multiplicity of each discriminant root.
    """
    half = p.restrict(length / 2.0)
    if bc is BoundaryCondition.PERIODIC:
        pair = (BoundaryCondition.NEUMANN, BoundaryCondition.DIRICHLET)
    else:
        pair = (BoundaryCondition.MIXED1, BoundaryCondition.MIXED2)
    audit: dict = {"method": "union", "scan_step": (hi - lo) / n_scan}
    tagged: list[tuple[float, str]] = []
    for sub in pair:
        sub_audit: dict = {}
        for v in _scan_roots(half, sub, lo, hi, n_scan, length / 2.0, tol,
                             integrator_tol, sub_audit):
            tagged.append((v, sub.value))
        if sub_audit:
            audit[f"scan_{sub.value}"] = sub_audit
    tagged.sort(key=lambda r: r[0])
    merged: list[tuple[float, int]] = []
    sources: list[tuple[str, ...]] = []
    for value, src in tagged:
        if merged and abs(value - merged[-1][0]) <= MERGE_RTOL * max(1.0, abs(value)):
            prev_v, prev_m = merged[-1]
            merged[-1] = (0.5 * (prev_v + value), min(2, prev_m + 1))
            sources[-1] = sources[-1] + (src,)
        else:
            merged.append((value, 1))
            sources.append((src,))
    audit["sources"] = [{"value": v, "from": list(s)}
                        for (v, _), s in zip(merged, sources)]
    return merged, audit


def find_eigenvalues(p: Potential, bc, search_range=None, max_count: int | None = None,
                     n_scan: int = DEFAULT_SCAN, tol: float = ROOT_XTOL,
                     length: float | None = None, integrator_tol: float = DEFAULT_TOL,
                     method: str = "auto", crosscheck: bool = True) -> Spectrum:
    """All eigenvalues of ``bc`` in the range (or the first ``max_count``).

    method: "union" assembles periodic/anti-periodic spectra from the
    half-interval separated problems (requires a potential even about its
    midpoint), "direct" root-finds the discriminant equation, "auto" picks
    union when the symmetry holds.
    """
    bc = BoundaryCondition.parse(bc)
    L = float(p.domain_length if length is None else length)
    if search_range is None:
        lo, hi = _auto_range(p, L, max_count if max_count else 8)
    else:
        lo, hi = (float(search_range[0]), float(search_range[1]))
        if not lo < hi:
            raise ValueError("search range must satisfy lo < hi")

    audit: dict = {"scan_step": (hi - lo) / n_scan}
    if bc.is_coupled:
        if method not in ("auto", "union", "direct"):
            raise ValueError(f"unknown method {method!r}")
        if method == "auto":
            method = "union" if p.is_even_about_midpoint() else "direct"
        elif method == "union" and not p.is_even_about_midpoint():
            raise ValueError("union method needs a potential even about its midpoint")
        if method == "union":
            merged, audit = _coupled_union(p, bc, lo, hi, n_scan, L, tol, integrator_tol)
            if crosscheck:
                direct, d_audit = _coupled_direct(p, bc, lo, hi, n_scan, L, tol,
                                                  integrator_tol)
                audit["delta_crosscheck"] = _match_sets(
                    [v for v, m in merged for _ in range(m)],
                    [v for v, m in direct for _ in range(m)], 1e-5)
                audit["delta_crosscheck"]["audit"] = d_audit
        else:
            merged, audit = _coupled_direct(p, bc, lo, hi, n_scan, L, tol, integrator_tol)
    else:
        values = _scan_roots(p, bc, lo, hi, n_scan, L, tol, integrator_tol, audit)
        merged = [(v, 1) for v in values]
        if bc is BoundaryCondition.DIRICHLET and merged and hi > merged[-1][0]:
            probe = 0.5 * (merged[-1][0] + hi)
            audit["oscillation"] = {
                "probe_lambda": probe,
                "interior_zeros": dirichlet_zero_count(p, probe, L, integrator_tol),
                "eigenvalues_below": sum(1 for v, _ in merged if v < probe),
            }

    if max_count is not None:
        kept: list[tuple[float, int]] = []
        total = 0
        for v, m in merged:
            if total >= max_count:
                break
            kept.append((v, m))
            total += m
        merged = kept
    eigenvalues = tuple(Eigenvalue(k, v, m) for k, (v, m) in enumerate(merged))
    return Spectrum(bc=bc, length=L, eigenvalues=eigenvalues,
                    search_range=(lo, hi), tol=tol, scan_points=n_scan, audit=audit)


def dirichlet_zero_count(p: Potential, lam: float, length: float | None = None,
                         tol: float = DEFAULT_TOL, npts: int = 2001) -> int:
    """Interior sign changes of y2(., lam); equals #{Dirichlet eigenvalues < lam}."""
    L = float(p.domain_length if length is None else length)
    basis = fundamental_solutions(p, lam, L, tol)
    ts = np.linspace(0.0, L, npts)[1:-1]
    vals = basis.trajectory(ts)[2]
    sign = np.sign(vals)
    sign = sign[sign != 0]
    return int(np.count_nonzero(sign[:-1] * sign[1:] < 0))


def neumann_extension_residual(p: Potential, lam: float,
                               tol: float = DEFAULT_TOL) -> float:
    """|y1'(2T, lam)| for the even extension.

    This is the extension's Neumann characteristic function; by the
    doubling identity it factors as 2 y1(T) y1'(T), so it vanishes exactly
    on the union of the base Neumann spectrum and the base u'(0)=u(T)=0
    spectrum.
    """
    even = p.even_extension()
    basis = fundamental_solutions(even, lam, even.domain_length, tol)
    return abs(basis.y1p_end)


def discriminant_samples(p: Potential, lo: float, hi: float, count: int = 400,
                         length: float | None = None, extend: bool = True,
                         accuracy: float = 1e-9):
    """(lambda, Delta) samples, by default for the even extension."""
    q = p.even_extension() if extend else p
    L = float(q.domain_length if length is None else length)
    lams = np.linspace(float(lo), float(hi), int(count))
    Y = endpoint_scan(q, lams, L, accuracy=accuracy)
    return lams, Y[0] + Y[3]


def _match_sets(lhs: list[float], rhs: list[float], pair_tol: float) -> dict:
    """Positional multiset comparison of two sorted expanded spectra."""
    lhs = sorted(lhs)
    rhs = sorted(rhs)
    k = min(len(lhs), len(rhs))
    diffs = [abs(a - b) for a, b in zip(lhs[:k], rhs[:k])]
    return {
        "lhs": lhs, "rhs": rhs,
        "diffs": diffs,
        "max_diff": max(diffs) if diffs else 0.0,
        "unmatched_lhs": lhs[k:], "unmatched_rhs": rhs[k:],
        "pass": bool(len(lhs) == len(rhs)
                     and all(d <= pair_tol for d in diffs)),
    }


def verify_spectral_decomposition(p: Potential, search_range=None, count: int = 6,
                                  pair_tol: float = 1e-5, n_scan: int = DEFAULT_SCAN,
                                  length: float | None = None,
                                  integrator_tol: float = DEFAULT_TOL) -> dict:
    """Check the three spectral-set equalities with multiplicity.

    The right side of each equality is recomputed from the discriminant of
    the extension (method="direct"), never assembled from the same
    separated spectra as the left side, so the comparison has content.
    """
    T = float(p.domain_length if length is None else length)
    base = p if length is None else p.restrict(T)
    even = base.even_extension()
    even2 = even.even_extension()

    sep = {bc: find_eigenvalues(base, bc, search_range=search_range,
                                max_count=None if search_range else count + 2,
                                n_scan=n_scan, integrator_tol=integrator_tol)
           for bc in ("N", "D", "M1", "M2")}

    def union_expanded(*bcs: str) -> list[float]:
        vals: list[float] = []
        for bc in bcs:
            vals.extend(sep[bc].expanded())
        return sorted(vals)

    nd = union_expanded("N", "D")
    mm = union_expanded("M1", "M2")
    all4 = sorted(nd + mm)

    def window(values: list[float]) -> tuple[float, float, int]:
        """Range covering at least ``count`` values, cut inside a wide gap.

        Cutting between members of a near-double pair is hopeless (the
        direct method cannot honor a boundary it cannot resolve), so the
        upper edge goes into the first gap beyond index count-1 that is
        comfortably wider than the pairing tolerance; everything up to
        that gap is compared.
        """
        if not values:
            lo, hi = _auto_range(base, T, count)
            return lo, hi, count
        lo = values[0] - 1.0
        for j in range(count, len(values)):
            if values[j] - values[j - 1] > 1e-3:
                return lo, 0.5 * (values[j - 1] + values[j]), j
        return lo, values[-1] + 1.0, len(values)

    reports = []
    for name, lhs_vals, pot, L2 in (
            ("N+D = P(2T)", nd, even, 2.0 * T),
            ("M1+M2 = A(2T)", mm, even, 2.0 * T),
            ("P(2T)+A(2T) = P(4T)", all4, even2, 4.0 * T)):
        bc = "A" if name.startswith("M1") else "P"
        if search_range:
            rng, take = search_range, None
        else:
            lo, hi, take = window(lhs_vals)
            rng = (lo, hi)
        direct = find_eigenvalues(pot, bc, search_range=rng, n_scan=n_scan,
                                  length=L2, integrator_tol=integrator_tol,
                                  method="direct")
        lhs = [v for v in lhs_vals if rng[0] <= v <= rng[1]][:take]
        rhs = direct.expanded()[:take]
        entry = _match_sets(lhs, rhs, pair_tol)
        entry["name"] = name
        entry["search_range"] = tuple(rng)
        reports.append(entry)

    return {
        "potential": base.descriptor_hash(),
        "count": count,
        "pair_tol": pair_tol,
        "equalities": reports,
        "pass": all(r["pass"] for r in reports),
    }


def _corner_function(p: Potential, corner: float, length: float,
                     integrator_tol: float):
    def g(lam: float) -> float:
        return kernel_value(p, lam, "N", corner, corner, length=length,
                            tol=integrator_tol)
    return g


def _first_corner_root(p: Potential, corner: float, lo: float, hi: float,
                       length: float, integrator_tol: float) -> float | None:
    """First zero of the Neumann kernel corner value between two Neumann poles."""
    g = _corner_function(p, corner, length, integrator_tol)
    span = hi - lo
    for frac in (1e-3, 1e-2, 0.05):
        a, b = lo + frac * span, hi - frac * span
        if not a < b:
            continue
        try:
            ga, gb = g(a), g(b)
        except ResonanceError:
            continue
        if ga == 0.0:
            return a
        if gb == 0.0:
            return b
        if np.sign(ga) != np.sign(gb):
            return brentq(g, a, b, xtol=1e-10)
    lams = np.linspace(lo + 1e-3 * span, hi - 1e-3 * span, 201)
    vals = []
    for lam in lams:
        try:
            vals.append(g(lam))
        except ResonanceError:
            vals.append(np.nan)
    vals = np.asarray(vals)
    ok = np.isfinite(vals)
    for j in range(len(lams) - 1):
        if ok[j] and ok[j + 1] and np.sign(vals[j]) != np.sign(vals[j + 1]):
            return brentq(g, lams[j], lams[j + 1], xtol=1e-10)
    return None


def first_eigenvalue_relations(p: Potential, tol: float = 1e-5,
                               margin: float = 1e-6, length: float | None = None,
                               n_scan: int = DEFAULT_SCAN,
                               integrator_tol: float = DEFAULT_TOL) -> dict:
    """First-eigenvalue equalities, orderings and corner characterizations.

    The corner zeros of the Neumann kernel are matched against the mixed
    eigenvalues: the (0,0) corner vanishes first at the lowest eigenvalue
    of the problem u(0)=u'(T)=0 and the (T,T) corner at the lowest of
    u'(0)=u(T)=0.  (The kernel corner values are -y2'(T)/y1'(T) and
    -y1(T)/y1'(T), so their zero sets are those two spectra exactly.)
    """
    T = float(p.domain_length if length is None else length)
    base = p if length is None else p.restrict(T)
    even = base.even_extension()

    lamN = find_eigenvalues(base, "N", max_count=2, n_scan=n_scan,
                            integrator_tol=integrator_tol)
    lamD = find_eigenvalues(base, "D", max_count=1, n_scan=n_scan,
                            integrator_tol=integrator_tol)
    lamM1 = find_eigenvalues(base, "M1", max_count=1, n_scan=n_scan,
                             integrator_tol=integrator_tol)
    lamM2 = find_eigenvalues(base, "M2", max_count=1, n_scan=n_scan,
                             integrator_tol=integrator_tol)
    lamN2 = find_eigenvalues(even, "N", max_count=1, n_scan=n_scan,
                             integrator_tol=integrator_tol)
    lamD2 = find_eigenvalues(even, "D", max_count=1, n_scan=n_scan,
                             integrator_tol=integrator_tol)
    lamP2 = find_eigenvalues(even, "P", max_count=1, n_scan=n_scan,
                             integrator_tol=integrator_tol, method="direct")
    lamA2 = find_eigenvalues(even, "A", max_count=1, n_scan=n_scan,
                             integrator_tol=integrator_tol, method="direct")

    vals = {
        "lambda_N": lamN.first(), "lambda_D": lamD.first(),
        "lambda_M1": lamM1.first(), "lambda_M2": lamM2.first(),
        "lambda_N_2T": lamN2.first(), "lambda_D_2T": lamD2.first(),
        "lambda_P_2T": lamP2.first(), "lambda_A_2T": lamA2.first(),
    }
    if any(v is None for v in vals.values()) or len(lamN.values()) < 2:
        return {"values": vals, "pass": False,
                "error": "not enough eigenvalues found in the scan range"}

    lam_n0, lam_n1 = lamN.values()[0], lamN.values()[1]

    def eq(lhs: float, rhs: float) -> dict:
        return {"kind": "equality", "lhs": lhs, "rhs": rhs,
                "diff": abs(lhs - rhs), "pass": bool(abs(lhs - rhs) <= tol)}

    def lt(lhs: float, rhs: float) -> dict:
        return {"kind": "strict", "lhs": lhs, "rhs": rhs,
                "margin": rhs - lhs, "pass": bool(rhs - lhs > margin)}

    # Sample points where every kernel involved is nonresonant.
    samples = [lam_n0 - 1.0,
               0.5 * (lam_n0 + min(vals["lambda_M1"], vals["lambda_M2"]))]
    corner_eqs = {0.0: [], T: []}
    for corner in (0.0, T):
        for lam_s in samples:
            c_base = kernel_value(base, lam_s, "N", corner, corner,
                                  tol=integrator_tol)
            c_ext = kernel_value(even, lam_s, "P", corner, corner,
                                 length=2.0 * T, tol=integrator_tol)
            entry = eq(c_base, 2.0 * c_ext)
            entry["lambda"] = lam_s
            corner_eqs[corner].append(entry)

    root00 = _first_corner_root(base, 0.0, lam_n0, lam_n1, T, integrator_tol)
    rootTT = _first_corner_root(base, T, lam_n0, lam_n1, T, integrator_tol)

    items = [
        {"item": 1,
         "description": "first Neumann eigenvalue survives the even extension "
                        "and equals the first periodic eigenvalue",
         "checks": [eq(vals["lambda_N"], vals["lambda_N_2T"]),
                    eq(vals["lambda_N"], vals["lambda_P_2T"])]},
        {"item": 5,
         "description": "Neumann kernel at (0,0) doubles the extension's periodic "
                        "corner value; its first zero is the first eigenvalue of "
                        "u(0)=u'(T)=0",
         "checks": corner_eqs[0.0] + ([eq(root00, vals["lambda_M2"])]
                                      if root00 is not None else
                                      [{"kind": "equality", "pass": False,
                                        "error": "corner root not bracketed"}])},
        {"item": 6,
         "description": "Neumann kernel at (T,T) doubles the extension's periodic "
                        "corner value; its first zero is the first eigenvalue of "
                        "u'(0)=u(T)=0",
         "checks": corner_eqs[T] + ([eq(rootTT, vals["lambda_M1"])]
                                    if rootTT is not None else
                                    [{"kind": "equality", "pass": False,
                                      "error": "corner root not bracketed"}])},
        {"item": 7,
         "description": "first anti-periodic eigenvalue of the extension is the "
                        "smaller of the two mixed eigenvalues",
         "checks": [eq(vals["lambda_A_2T"],
                       min(vals["lambda_M1"], vals["lambda_M2"]))]},
        {"item": 8,
         "description": "first eigenvalue of u(0)=u'(T)=0 equals the extension's "
                        "first Dirichlet eigenvalue and both precede the base "
                        "Dirichlet eigenvalue",
         "checks": [eq(vals["lambda_M2"], vals["lambda_D_2T"]),
                    lt(vals["lambda_D_2T"], vals["lambda_D"])]},
        {"item": 9,
         "description": "first Neumann eigenvalue precedes the first eigenvalue "
                        "of u'(0)=u(T)=0",
         "checks": [lt(vals["lambda_N"], vals["lambda_M1"])]},
    ]
    for item in items:
        item["pass"] = all(c["pass"] for c in item["checks"])
    vals["corner_root_00"] = root00
    vals["corner_root_TT"] = rootTT
    return {"values": vals, "items": items, "tol": tol, "margin": margin,
            "pass": all(item["pass"] for item in items)}


def _chain_links(sequence: list[tuple[str, float]], relations: list[str],
                 margin_floor: float = 0.0) -> dict:
    links = []
    for (name_a, va), (name_b, vb), rel in zip(sequence, sequence[1:], relations):
        ok = va < vb - margin_floor if rel == "<" else va <= vb + 1e-9
        links.append({"lhs": name_a, "rhs": name_b, "relation": rel,
                      "lhs_value": va, "rhs_value": vb,
                      "margin": vb - va, "pass": bool(ok)})
    return {"links": links, "pass": all(l["pass"] for l in links)}


def verify_interlacing(p: Potential, count: int = 3, search_range=None,
                       n_scan: int = DEFAULT_SCAN, length: float | None = None,
                       margin: float = 1e-6,
                       integrator_tol: float = DEFAULT_TOL) -> dict:
    """Ordering chains tying the four separated spectra to the extension's.

    Covers the classical alternation of periodic and anti-periodic
    eigenvalues of the even extension, the per-index interlacing of each
    mixed spectrum with Neumann and Dirichlet, and the grouped global
    chain.  Mixed-vs-mixed and Neumann-vs-Dirichlet alternation is only
    observed and reported, never asserted.
    """
    T = float(p.domain_length if length is None else length)
    base = p if length is None else p.restrict(T)

    need = count + 2
    sep = {bc: find_eigenvalues(base, bc, search_range=search_range,
                                max_count=need, n_scan=n_scan,
                                integrator_tol=integrator_tol).values()
           for bc in ("N", "D", "M1", "M2")}
    if any(len(v) < count + 1 for v in sep.values()):
        return {"pass": False, "error": "not enough eigenvalues per problem",
                "found": {k: len(v) for k, v in sep.items()}}

    even = base.even_extension()
    spec_p = find_eigenvalues(even, "P", max_count=2 * need, n_scan=n_scan,
                              integrator_tol=integrator_tol, method="union",
                              crosscheck=False)
    spec_a = find_eigenvalues(even, "A", max_count=2 * need, n_scan=n_scan,
                              integrator_tol=integrator_tol, method="union",
                              crosscheck=False)
    pexp = spec_p.expanded()
    aexp = spec_a.expanded()

    chains = {}

    # lambda_0 < mu_1 <= mu_2 < lambda_1 <= lambda_2 < mu_3 <= mu_4 < ...
    seq: list[tuple[str, float]] = []
    rels: list[str] = []
    groups = min((len(pexp) - 1) // 2, len(aexp) // 2, count)
    if pexp and aexp:
        seq.append(("P0", pexp[0]))
        for g in range(groups):
            seq.append((f"A{2*g+1}", aexp[2 * g]))
            seq.append((f"A{2*g+2}", aexp[2 * g + 1]))
            rels.extend(["<", "<="])
            if 2 * g + 2 < len(pexp):
                seq.append((f"P{2*g+1}", pexp[2 * g + 1]))
                seq.append((f"P{2*g+2}", pexp[2 * g + 2]))
                rels.extend(["<", "<="])
    chains["oscillation"] = _chain_links(seq, rels, margin)
    chains["oscillation"]["sequence"] = [v for _, v in seq]

    def per_index(name: str, low: str, mid: str) -> None:
        seq2: list[tuple[str, float]] = []
        rels2: list[str] = []
        for k in range(count):
            seq2.append((f"{low}{k}", sep[low][k]))
            seq2.append((f"{mid}{k}", sep[mid][k]))
            rels2.extend(["<", "<"])
        seq2.append((f"{low}{count}", sep[low][count]))
        chains[name] = _chain_links(seq2, rels2, margin)

    per_index("N_M1", "N", "M1")
    per_index("M2_D", "M2", "D")
    per_index("N_M2", "N", "M2")
    per_index("M1_D", "M1", "D")

    # N0 < {M1_0, M2_0} < {D0, N1} < {M1_1, M2_1} < ...
    group_links = []
    prev_name, prev_max = "N0", sep["N"][0]
    for k in range(count):
        for names, vals2 in (((f"M1_{k}", f"M2_{k}"),
                              (sep["M1"][k], sep["M2"][k])),
                             ((f"D{k}", f"N{k+1}"),
                              (sep["D"][k], sep["N"][k + 1]))):
            lo_v = min(vals2)
            ok = lo_v - prev_max > margin
            group_links.append({"lhs": prev_name, "rhs": "/".join(names),
                                "margin": lo_v - prev_max, "pass": bool(ok)})
            prev_name, prev_max = "/".join(names), max(vals2)
    chains["groups"] = {"links": group_links,
                        "pass": all(l["pass"] for l in group_links)}

    # Multiplicity coherence of the union assembly.
    parity = []
    for entry in spec_a.audit.get("sources", []):
        if len(entry["from"]) == 2:
            parity.append({"value": entry["value"], "from": entry["from"],
                           "pass": set(entry["from"]) == {"M1", "M2"}})
    for entry in spec_p.audit.get("sources", []):
        if len(entry["from"]) == 2:
            parity.append({"value": entry["value"], "from": entry["from"],
                           "pass": set(entry["from"]) == {"N", "D"}})
    parity_pass = all(e["pass"] for e in parity) if parity else True

    def pattern(first: str, second: str) -> str:
        tags = sorted([(v, first) for v in sep[first][:need]]
                      + [(v, second) for v in sep[second][:need]])
        return "".join(t for _, t in tags)

    observations = {
        "mixed_order_pattern": pattern("M1", "M2"),
        "neumann_dirichlet_pattern": pattern("N", "D"),
        "mixed_spectra_coincide": bool(
            max(abs(x - y) for x, y in zip(sep["M1"][:count], sep["M2"][:count]))
            <= 1e-6),
    }

    ok_all = all(c["pass"] for c in chains.values()) and parity_pass
    return {"potential": base.descriptor_hash(), "count": count,
            "chains": chains, "pair_parity": parity,
            "pair_parity_pass": parity_pass,
            "observations": observations, "pass": bool(ok_all)}


def stability_intervals(p: Potential, search_range=None, n_scan: int = DEFAULT_SCAN,
                        length: float | None = None,
                        integrator_tol: float = DEFAULT_TOL) -> list[tuple[tuple[float, float], str]]:
    """Stable/unstable bands of the even extension's discriminant.

    Band edges are the lambda where |Delta| crosses 2, refined by Brent to
    1e-9; eigenvalues where Delta touches +-2 without crossing split a
    stable band at a point and are injected from the union spectra.
    """
    T = float(p.domain_length if length is None else length)
    base = p if length is None else p.restrict(T)
    even = base.even_extension()
    L2 = 2.0 * T
    if search_range is None:
        lo, hi = _auto_range(base, T, 8)
    else:
        lo, hi = (float(search_range[0]), float(search_range[1]))

    lams = np.linspace(lo, hi, n_scan + 1)
    Y = endpoint_scan(even, lams, L2)
    g = np.abs(Y[0] + Y[3]) - 2.0

    def fine(lam: float) -> float:
        basis = fundamental_solutions(even, lam, L2, integrator_tol)
        return abs(basis.discriminant) - 2.0

    step = (hi - lo) / n_scan
    edges: list[float] = []
    sign = np.sign(g)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        bracket = _sign_bracket(fine, lams[i], lams[i + 1], step)
        if bracket is None:
            continue
        a, b = bracket
        edges.append(a if a == b else brentq(fine, a, b, xtol=1e-9))
    for i in np.nonzero(sign == 0)[0]:
        edges.append(float(lams[i]))

    # Tangency points (double eigenvalues) never change the sign of |Delta|-2;
    # they pinch a stable band at a point.
    for bc in ("P", "A"):
        spec = find_eigenvalues(even, bc, search_range=(lo, hi), n_scan=n_scan,
                                integrator_tol=integrator_tol, method="union",
                                crosscheck=False)
        for e in spec.eigenvalues:
            if e.multiplicity == 2 and lo < e.value < hi \
                    and all(abs(e.value - x) > 1e-7 * max(1.0, abs(e.value))
                            for x in edges):
                edges.append(e.value)

    edges = sorted(edges)
    cuts = [lo] + edges + [hi]
    out: list[tuple[tuple[float, float], str]] = []
    for a, b in zip(cuts, cuts[1:]):
        if b - a <= 1e-12:
            continue
        mid = 0.5 * (a + b)
        cls = "stable" if fine(mid) < 0.0 else "unstable"
        out.append(((a, b), cls))
    return out
