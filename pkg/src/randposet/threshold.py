"""Containment-threshold exponents of patterns in random subset lattices.

The central quantity is the best exponent a weighting on a poset's
antichains can guarantee simultaneously for every nonempty subposet: the
maximum over the probability simplex of the minimum, over subposets Q, of
the shadow entropy divided by |Q|. This module computes that value with a
certified bracket, classifies posets by which special weightings are
optimal, and provides the closed-form thresholds and bounds that accompany
the general optimizer.
"""

from __future__ import annotations

import hashlib
import math
import os
import pickle
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linprog, minimize_scalar
from scipy.special import xlogy

from .posets import (
    CapacityError,
    PosetError,
    antichains,
    automorphisms,
    connected_components,
    induced_subposet,
    poset_key,
    reverse_automorphisms,
    _bits,
)
from .correspondence import ShadowMap

CACHE_ENV = "RANDPOSET_CACHE_DIR"
DEFAULT_SIZE_CAP = 14


def entropy(alpha):
    """Shannon entropy in nats, with 0 log 0 = 0."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < -1e-12):
        raise PosetError("weighting has a negative coordinate")
    return float(-xlogy(alpha, alpha).sum())


def binary_entropy(x):
    """Entropy of a two-point distribution (x, 1-x)."""
    return entropy([x, 1.0 - x])


# -- the per-subposet evaluation table ----------------------------------------


class ExponentTable:
    """Precomputed shadow index maps for every nonempty subposet.

    Evaluation of all subposet exponents for one weighting is a single
    weighted bincount over a fixed concatenated index array followed by
    segmented entropy sums.
    """

    __slots__ = (
        "poset",
        "family",
        "q_masks",
        "sizes",
        "sigma_list",
        "big_index",
        "seg_offsets",
        "total_len",
    )

    def __init__(self, poset, family, q_masks, sizes, sigma_list, sub_counts):
        self.poset = poset
        self.family = family
        self.q_masks = q_masks
        self.sizes = np.asarray(sizes, dtype=float)
        self.sigma_list = sigma_list
        offsets = np.zeros(len(q_masks) + 1, dtype=np.intp)
        np.cumsum(sub_counts, out=offsets[1:])
        self.seg_offsets = offsets
        self.total_len = int(offsets[-1])
        big = np.empty(len(family) * len(q_masks), dtype=np.intp)
        m = len(family)
        for qi, sigma in enumerate(sigma_list):
            big[qi * m : (qi + 1) * m] = sigma + offsets[qi]
        self.big_index = big

    @classmethod
    def build(cls, poset, family=None, threads=1):
        """Construct the table, optionally reusing an on-disk cache."""
        if family is None:
            family = antichains(poset)
        cached = _load_cached_table(poset, family)
        if cached is not None:
            return cached
        q_masks = [q for q in range(1, 1 << poset.n)]

        def one(q):
            shadow = ShadowMap(family, q)
            return q.bit_count(), shadow.sigma, len(shadow.subfamily)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(one, q_masks))
        else:
            rows = [one(q) for q in q_masks]
        sizes = [r[0] for r in rows]
        sigma_list = [r[1] for r in rows]
        sub_counts = [r[2] for r in rows]
        table = cls(poset, family, q_masks, sizes, sigma_list, sub_counts)
        _store_cached_table(poset, table)
        return table

    def values(self, alpha):
        """Exponent of every nonempty subposet under one weighting."""
        alpha = np.asarray(alpha, dtype=float)
        tiled = np.tile(alpha, len(self.q_masks))
        beta = np.bincount(self.big_index, weights=tiled, minlength=self.total_len)
        terms = -xlogy(beta, beta)
        seg = np.add.reduceat(terms, self.seg_offsets[:-1])
        # reduceat on an empty trailing segment cannot occur: every subposet
        # has at least the empty antichain, so all segments are nonempty.
        return seg / self.sizes

    def objective(self, alpha):
        """The inner minimum over subposets."""
        return float(self.values(alpha).min())

    def gradient(self, alpha, q_index, beta=None):
        """Supergradient of one subposet exponent at alpha."""
        sigma = self.sigma_list[q_index]
        if beta is None:
            beta = np.bincount(
                sigma,
                weights=np.asarray(alpha, dtype=float),
                minlength=self.seg_offsets[q_index + 1] - self.seg_offsets[q_index],
            )
        safe = np.maximum(beta, 1e-300)
        return (-np.log(safe[sigma]) - 1.0) / self.sizes[q_index]


def _cache_path(poset):
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    digest = hashlib.sha256(repr(poset_key(poset)).encode()).hexdigest()[:24]
    return os.path.join(root, "shadow_%s.pkl" % digest)


def _load_cached_table(poset, family):
    path = _cache_path(poset)
    if not path or not os.path.exists(path):
        return None
    try:
        with open(path, "rb") as fh:
            data = pickle.load(fh)
        if data["key"] != poset_key(poset) or data["masks"] != family.masks:
            return None
        return ExponentTable(
            poset, family, data["q_masks"], data["sizes"], data["sigma_list"], data["sub_counts"]
        )
    except Exception:
        return None


def _store_cached_table(poset, table):
    path = _cache_path(poset)
    if not path:
        return
    os.makedirs(os.path.dirname(path), exist_ok=True)
    data = {
        "key": poset_key(poset),
        "masks": table.family.masks,
        "q_masks": table.q_masks,
        "sizes": [int(s) for s in table.sizes],
        "sigma_list": table.sigma_list,
        "sub_counts": [
            int(table.seg_offsets[i + 1] - table.seg_offsets[i]) for i in range(len(table.q_masks))
        ],
    }
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        pickle.dump(data, fh)
    os.replace(tmp, path)


_TABLE_CACHE = {}


def _get_table(poset, threads=1):
    """Process-local table cache keyed by the poset's order."""
    key = poset_key(poset)
    hit = _TABLE_CACHE.get(key)
    if hit is None:
        family = antichains(poset)
        hit = ExponentTable.build(poset, family, threads=threads)
        _TABLE_CACHE[key] = hit
    return hit


def critical_exponent_wrt(poset, alpha, q_mask, family=None):
    """Exponent of one subposet under one weighting: shadow entropy / |Q|."""
    if q_mask == 0:
        raise PosetError("subposet must be nonempty")
    if family is None:
        family = antichains(poset)
    beta = ShadowMap(family, q_mask).push_weighting(alpha)
    return entropy(beta) / q_mask.bit_count()


# -- symmetry ------------------------------------------------------------------


def _apply_element_perm(mask, perm):
    out = 0
    for i in _bits(mask):
        out |= 1 << perm[i]
    return out


def antichain_symmetry_group(poset, family):
    """Index permutations of the antichain family that leave the objective fixed.

    Generated by automorphisms acting elementwise and, for each
    order-reversing self-bijection psi, the complementation action sending an
    antichain S to psi^{-1} of the maximal elements outside S's up-set.
    """
    m = len(family)
    full = poset.full_mask()
    gens = set()
    for phi in automorphisms(poset):
        gens.add(tuple(family.position(_apply_element_perm(s, phi)) for s in family.masks))
    for psi in reverse_automorphisms(poset):
        psi_inv = [0] * poset.n
        for i, v in enumerate(psi):
            psi_inv[v] = i
        perm = []
        for s in family.masks:
            comp = full & ~poset.upset_of(s)
            maxers = 0
            for i in _bits(comp):
                if not poset.above[i] & comp:
                    maxers |= 1 << i
            perm.append(family.position(_apply_element_perm(maxers, psi_inv)))
        gens.add(tuple(perm))
    identity = tuple(range(m))
    group = {identity}
    frontier = [g for g in gens if g != identity]
    for g in frontier:
        if sorted(g) != list(range(m)):
            raise PosetError("symmetry action is not a permutation (internal error)")
    group.update(frontier)
    while frontier:
        g = frontier.pop()
        for h in list(group):
            for comp in (tuple(g[j] for j in h), tuple(h[j] for j in g)):
                if comp not in group:
                    group.add(comp)
                    frontier.append(comp)
    return [np.array(g, dtype=np.intp) for g in sorted(group)]


def _orbit_average(alpha, group):
    if len(group) <= 1:
        return alpha
    out = np.zeros_like(alpha)
    for perm in group:
        pushed = np.empty_like(alpha)
        pushed[perm] = alpha
        out += pushed
    return out / len(group)


# -- reports -------------------------------------------------------------------


@dataclass
class CriticalExponentReport:
    """Certified result of the max-min exponent computation."""

    poset_name: str
    size: int
    family_size: int
    value: float
    lower_bound: float
    upper_bound: float
    certificate: list
    active_subposets: list
    classification: str
    iterations: int
    tolerance: float
    converged: bool
    notes: list = field(default_factory=list)

    def to_json_dict(self):
        """The stable machine-readable record."""
        return {
            "poset": self.poset_name,
            "m": self.family_size,
            "value": self.value,
            "lower": self.lower_bound,
            "upper": self.upper_bound,
            "certificate": [float(v) for v in self.certificate],
            "active": [int(q) for q in self.active_subposets],
            "class": self.classification,
            "iterations": self.iterations,
            "tolerance": self.tolerance,
        }


@dataclass
class BalancedSolution:
    """Root and weighting of the two-point balance equation."""

    x_star: float
    c_value: float
    weighting: np.ndarray


@dataclass
class Classification:
    """Outcome of the uniform/balanced definition checks."""

    label: str
    violations: list
    details: dict


# -- the optimizer -------------------------------------------------------------


def _default_tol(n):
    return 1e-6 if n <= 8 else 1e-4


def _dual_upper_bound(table, alpha, active_tol=1e-3, max_terms=120):
    """Certified upper bound from supergradients at (a slightly interior) alpha.

    For weights lambda on a set of subposets, concavity of each exponent
    gives, for every feasible weighting, a bound
    sum_q lambda_q / |Q_q| + max_j (sum_q lambda_q grad_q)_j; minimizing over
    lambda is a small linear program.
    """
    alpha = np.asarray(alpha, dtype=float)
    m = alpha.size
    interior = (1.0 - 1e-9) * alpha + 1e-9 / m
    interior /= interior.sum()
    vals = table.values(interior)
    g = vals.min()
    order = np.argsort(vals)
    chosen = [qi for qi in order if vals[qi] <= g + active_tol][:max_terms]
    grads = np.column_stack([table.gradient(interior, qi) for qi in chosen])
    inv_sizes = np.array([1.0 / table.sizes[qi] for qi in chosen])
    k = len(chosen)
    c = np.concatenate([inv_sizes, [1.0]])
    a_ub = np.hstack([grads, -np.ones((m, 1))])
    b_ub = np.zeros(m)
    a_eq = np.concatenate([np.ones(k), [0.0]])[None, :]
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=[1.0],
        bounds=[(0, None)] * k + [(None, None)],
        method="highs",
    )
    if not res.success:
        return math.inf
    return float(res.fun)


def _kkt_polish(table, alpha, active_tol=1e-4, max_active=48, rounds=6):
    """Newton refinement of a near-optimal weighting on its active set.

    Solves the stationarity system for the detected support and active
    subposets; returns a refined full weighting, or None when the solve does
    not produce a usable point. The caller re-evaluates honestly.
    """
    alpha = np.asarray(alpha, dtype=float)
    support = np.where(alpha > 1e-10)[0]
    if support.size == 0:
        return None
    vals = table.values(alpha)
    g = vals.min()
    order = np.argsort(vals)
    active = [qi for qi in order if vals[qi] <= g + active_tol][:max_active]
    if not active:
        return None
    for _ in range(rounds):
        result = _kkt_solve(table, alpha, support, active)
        if result is None:
            return None
        refined, lam = result
        bad = [active[t] for t in range(len(active)) if lam[t] < -1e-7]
        if not bad or len(active) <= 1:
            return refined
        active = [qi for qi in active if qi not in bad]
        alpha = refined
    return refined


def _kkt_solve(table, alpha, support, active, iters=60):
    s = support.size
    k = len(active)
    x = np.maximum(alpha[support], 1e-14)
    x = x / x.sum()
    lam = np.full(k, 1.0 / k)
    nu = 0.0
    t = table.objective(alpha)
    sigma_s = [table.sigma_list[qi][support] for qi in active]
    m_q = [
        int(table.seg_offsets[qi + 1] - table.seg_offsets[qi]) for qi in active
    ]
    sizes = [float(table.sizes[qi]) for qi in active]

    def assemble(x, lam, nu, t):
        grads = np.empty((s, k))
        hess = np.zeros((s, s))
        h_vals = np.empty(k)
        for a in range(k):
            beta = np.bincount(sigma_s[a], weights=x, minlength=m_q[a])
            safe = np.maximum(beta, 1e-300)
            grads[:, a] = (-np.log(safe[sigma_s[a]]) - 1.0) / sizes[a]
            h_vals[a] = float(-xlogy(beta, beta).sum()) / sizes[a]
            one_hot = np.zeros((s, m_q[a]))
            one_hot[np.arange(s), sigma_s[a]] = 1.0
            inv = np.where(beta > 0, 1.0 / safe, 0.0)
            hess += lam[a] * (-(one_hot * inv) @ one_hot.T / sizes[a])
        r1 = grads @ lam - nu
        r2 = h_vals - t
        r3 = np.array([x.sum() - 1.0])
        r4 = np.array([lam.sum() - 1.0])
        res = np.concatenate([r1, r2, r3, r4])
        jac = np.zeros((s + k + 2, s + k + 2))
        jac[:s, :s] = hess
        jac[:s, s : s + k] = grads
        jac[:s, s + k] = -1.0
        jac[s : s + k, :s] = grads.T
        jac[s : s + k, s + k + 1] = -1.0
        jac[s + k, :s] = 1.0
        jac[s + k + 1, s : s + k] = 1.0
        return res, jac

    for _ in range(iters):
        res, jac = assemble(x, lam, nu, t)
        if not np.all(np.isfinite(res)):
            return None
        if np.abs(res).max() < 1e-13:
            break
        try:
            step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        except np.linalg.LinAlgError:
            return None
        dx = step[:s]
        dlam = step[s : s + k]
        scale = 1.0
        neg = dx < 0
        if np.any(neg):
            scale = min(scale, float(0.8 * np.min(x[neg] / -dx[neg])))
        if not math.isfinite(scale) or scale <= 0:
            return None
        x = x + scale * dx
        lam = lam + scale * dlam
        nu += scale * step[s + k]
        t += scale * step[s + k + 1]
        x = np.maximum(x, 1e-300)
        x = x / x.sum()
    refined = np.zeros(len(table.family))
    refined[support] = x
    return refined, lam


def two_point_weighting(family, x_star):
    """Weighting with mass x at the empty antichain and at the minimum's singleton."""
    poset = family.poset
    mins = poset.minimal_elements()
    if len(mins) != 1:
        raise PosetError("two-point weighting needs a unique minimal element")
    m = len(family)
    rest = (1.0 - 2.0 * x_star) / (m - 2)
    alpha = np.full(m, rest)
    alpha[family.position(0)] = x_star
    alpha[family.position(1 << mins[0])] = x_star
    return alpha


def balanced_solve(poset, family=None):
    """Solve the two-point balance equation for a bounded poset.

    Finds the weight x at which the two-element chain through the bounds and
    the full poset yield the same exponent under the two-point weighting,
    then returns that root, the common exponent, and the weighting.
    """
    if not poset.is_bounded():
        raise PosetError("balance equation needs a unique minimum and maximum")
    if poset.n < 2:
        raise PosetError("balance equation needs at least two elements")
    if family is None:
        family = antichains(poset)
    a = len(family)
    if a < 3:
        raise PosetError("balance equation needs at least three antichains")
    n = poset.n

    def chain_side(x):
        return (-2.0 * xlogy(x, x) - xlogy(1.0 - 2.0 * x, 1.0 - 2.0 * x)) / 2.0

    def full_side(x):
        w = 1.0 - 2.0 * x
        return (-2.0 * xlogy(x, x) - xlogy(w, w / (a - 2.0))) / n

    def diff(x):
        return chain_side(x) - full_side(x)

    grid = np.linspace(1e-9, 0.5 - 1e-12, 4097)
    vals = np.array([diff(x) for x in grid])
    if np.max(np.abs(vals)) < 1e-14:
        raise PosetError(
            "balance equation is degenerate for this poset "
            "(the chain and full-poset exponents coincide identically)"
        )
    root = None
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            root = grid[i]
            break
        if vals[i] * vals[i + 1] < 0:
            root = brentq(diff, grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16)
            break
    if root is None:
        raise PosetError(
            "balance equation has no root in (0, 1/2) for this poset "
            "(no crossing of the chain and full-poset exponents)"
        )
    c_value = float(chain_side(root))
    return BalancedSolution(float(root), c_value, two_point_weighting(family, root))


def classify(poset, family=None, table=None, tol=1e-9):
    """Decide which special weighting, if any, attains the max-min exponent.

    UniformlyBalanced when the uniform weighting already minimizes at the
    full poset; otherwise Balanced when the two-point balanced weighting
    does; otherwise General. Violations list the subposets that dip below
    the target, as (mask, value, target) triples.
    """
    if family is None:
        family = antichains(poset)
    if table is None:
        table = _get_table(poset)
    m = len(family)
    n = poset.n
    uniform = np.full(m, 1.0 / m)
    vals = table.values(uniform)
    target = math.log(m) / n
    violations = [
        (int(table.q_masks[i]), float(vals[i]), target)
        for i in range(len(vals))
        if vals[i] < target - tol
    ]
    details = {"uniform_value": target, "uniform_min": float(vals.min())}
    if not violations:
        return Classification("UniformlyBalanced", [], details)
    uniform_violations = violations
    if poset.is_bounded() and n >= 2 and m >= 4:
        try:
            sol = balanced_solve(poset, family)
        except PosetError as err:
            details["balanced_error"] = str(err)
        else:
            bvals = table.values(sol.weighting)
            btarget = float(bvals[table.q_masks.index(poset.full_mask())])
            bviol = [
                (int(table.q_masks[i]), float(bvals[i]), btarget)
                for i in range(len(bvals))
                if bvals[i] < btarget - tol
            ]
            details["balanced_x"] = sol.x_star
            details["balanced_value"] = sol.c_value
            if not bviol:
                return Classification("Balanced", [], details)
            details["balanced_violations"] = bviol
    return Classification("General", uniform_violations, details)


def c_star(
    poset,
    tol=None,
    max_iter=6000,
    seed=0,
    threads=1,
    size_cap=DEFAULT_SIZE_CAP,
    name=None,
):
    """Certified max-min containment exponent of a poset.

    Entropic mirror ascent over the antichain simplex with orbit averaging,
    a Newton polish on the detected active set, and a linear-programming
    dual certificate for the upper bound. Disconnected posets decompose as
    the minimum over their components.
    """
    if poset.n == 0:
        raise PosetError("exponent of the empty poset is undefined")
    if poset.n > size_cap:
        raise CapacityError(
            "poset has %d elements, above the subposet-scan cap %d" % (poset.n, size_cap)
        )
    if tol is None:
        tol = _default_tol(poset.n)
    if name is None:
        name = "poset(n=%d)" % poset.n
    comps = connected_components(poset)
    if len(comps) > 1:
        return _c_star_disconnected(poset, comps, tol, max_iter, threads, size_cap, name)

    family = antichains(poset)
    table = _get_table(poset, threads=threads)
    m = len(family)
    group = antichain_symmetry_group(poset, family)
    notes = []

    starts = [np.full(m, 1.0 / m)]
    balanced_start = None
    if poset.is_bounded() and poset.n >= 2 and m >= 4:
        try:
            balanced_start = balanced_solve(poset, family)
            starts.append(balanced_start.weighting)
            notes.append("balanced two-point start available")
        except PosetError:
            pass

    uppers = [math.log(m) / poset.n]
    if poset.is_bounded() and poset.n >= 2:
        try:
            uppers.append(bounded_upper_bound(poset, family=family))
        except PosetError:
            pass

    best_alpha = None
    best_val = -math.inf
    for alpha0 in starts:
        v = table.objective(alpha0)
        if v > best_val:
            best_val, best_alpha = v, alpha0

    upper = min(uppers)
    iterations = 0
    alpha = np.array(best_alpha, dtype=float)

    def try_improvements(candidate):
        nonlocal best_val, best_alpha
        if candidate is None:
            return
        v = table.objective(candidate)
        if v > best_val:
            best_val = v
            best_alpha = candidate

    poll = 200
    eta0 = 0.5
    while upper - best_val > tol and iterations < max_iter:
        for _ in range(poll):
            iterations += 1
            vals = table.values(alpha)
            g = float(vals.min())
            if g > best_val:
                best_val = g
                best_alpha = alpha.copy()
            active = np.where(vals <= g + 1e-9)[0]
            grad = np.zeros(m)
            for qi in active:
                grad += table.gradient(alpha, qi)
            grad /= len(active)
            eta = eta0 / math.sqrt(iterations)
            logs = np.log(np.maximum(alpha, 1e-300)) + eta * (grad - grad.max())
            logs -= logs.max()
            alpha = np.exp(logs)
            alpha /= alpha.sum()
            alpha = _orbit_average(alpha, group)
            alpha = np.maximum(alpha, 0.0)
            alpha /= alpha.sum()
        try_improvements(_orbit_average(alpha, group))
        try_improvements(_kkt_polish(table, best_alpha))
        upper = min(upper, _dual_upper_bound(table, best_alpha))

    # One last polish and certification round for fast-converging cases.
    if upper - best_val > 1e-15:
        try_improvements(_kkt_polish(table, best_alpha))
        upper = min(upper, _dual_upper_bound(table, best_alpha))
    # The lower bound is itself a certified value, so a marginally smaller
    # upper bound can only be roundoff.
    upper = max(upper, best_val)
    converged = upper - best_val <= tol
    if not converged:
        notes.append("iteration cap reached with bracket width %.3e" % (upper - best_val))

    label = classify(poset, family, table).label
    atol = max(1e-9, upper - best_val)
    vals = table.values(best_alpha)
    active_masks = sorted(
        (int(table.q_masks[i]) for i in range(len(vals)) if vals[i] <= best_val + atol),
        key=lambda q: tuple(_bits(q)),
    )
    return CriticalExponentReport(
        poset_name=name,
        size=poset.n,
        family_size=m,
        value=best_val,
        lower_bound=best_val,
        upper_bound=upper,
        certificate=[float(v) for v in best_alpha],
        active_subposets=active_masks,
        classification=label,
        iterations=iterations,
        tolerance=tol,
        converged=converged,
        notes=notes,
    )


def _c_star_disconnected(poset, comps, tol, max_iter, threads, size_cap, name):
    """Component decomposition: the exponent is the minimum over components."""
    family = antichains(poset)
    table = _get_table(poset, threads=threads)
    reports = []
    for comp in comps:
        sub = induced_subposet(poset, comp)
        reports.append(
            c_star(
                sub,
                tol=tol,
                max_iter=max_iter,
                threads=threads,
                size_cap=size_cap,
                name=name + "[component]",
            )
        )
    # Product certificate: weight of an antichain is the product of its
    # component restrictions' weights.
    comp_data = []
    for comp, rep in zip(comps, reports):
        sub = induced_subposet(poset, comp)
        sub_family = antichains(sub)
        local_bit = {e: k for k, e in enumerate(sub.parent_elements)}
        cert = np.asarray(rep.certificate)
        comp_data.append((comp, local_bit, sub_family, cert))
    alpha = np.empty(len(family))
    for j, s in enumerate(family.masks):
        w = 1.0
        for comp, local_bit, sub_family, cert in comp_data:
            local = 0
            for i in _bits(s & comp):
                local |= 1 << local_bit[i]
            w *= cert[sub_family.position(local)]
        alpha[j] = w
    alpha = np.maximum(alpha, 0)
    alpha /= alpha.sum()
    vals = table.values(alpha)
    lower = float(vals.min())
    upper = min(rep.upper_bound for rep in reports)
    iterations = sum(rep.iterations for rep in reports)
    converged = upper - lower <= tol
    atol = max(1e-9, upper - lower)
    active_masks = sorted(
        (int(table.q_masks[i]) for i in range(len(vals)) if vals[i] <= lower + atol),
        key=lambda q: tuple(_bits(q)),
    )
    label = classify(poset, family, table).label
    notes = ["component decomposition over %d components" % len(comps)]
    return CriticalExponentReport(
        poset_name=name,
        size=poset.n,
        family_size=len(family),
        value=lower,
        lower_bound=lower,
        upper_bound=upper,
        certificate=[float(v) for v in alpha],
        active_subposets=active_masks,
        classification=label,
        iterations=iterations,
        tolerance=tol,
        converged=converged,
        notes=notes,
    )


# -- closed forms and bounds ---------------------------------------------------


def star_threshold():
    """Root and value of the single-lift equation at the two-point fan.

    Solves (1-x) log 2 = H2(x); returns (x, H2(x)).
    """
    f = lambda x: (1.0 - x) * math.log(2.0) - binary_entropy(x)
    x = brentq(f, 1e-9, 0.5 - 1e-12, xtol=1e-15, rtol=8.9e-16)
    return float(x), binary_entropy(x)


def wide_diamond_threshold():
    """Root and value of the bounded-fan equation.

    Solves 2(1-3x) log 2 = H2(2x); returns (x, (1-2x) log 2).
    """
    f = lambda x: 2.0 * (1.0 - 3.0 * x) * math.log(2.0) - binary_entropy(2.0 * x)
    x = brentq(f, 1e-9, 1.0 / 3.0 - 1e-12, xtol=1e-15, rtol=8.9e-16)
    return float(x), float((1.0 - 2.0 * x) * math.log(2.0))


def chain_threshold(t):
    """Exact exponent of the t-element chain: log(t+1)/t."""
    if t < 1:
        raise PosetError("chain length must be >= 1")
    return math.log(t + 1.0) / t


def blowup_bounds(layers, t):
    """Bracket for the chain of ``layers`` antichains of size t."""
    if layers < 1 or t < 1:
        raise PosetError("blowup parameters must be >= 1")
    lo = math.log(2.0) / layers
    hi = lo + math.log(layers - (layers - 1) * 2.0 ** (-t)) / (layers * t)
    return lo, hi


def lift_bound(exponent, kind="bottom"):
    """Lower bound for the exponent after adding a new global bottom (and top).

    ``exponent`` is the base poset's exponent (a float, or a poset to
    compute). Kind "bottom" bounds the poset with one new minimum below
    everything; kind "bottom-top" also adds a new maximum above everything.
    """
    if hasattr(exponent, "above"):
        exponent = c_star(exponent).value
    c = float(exponent)
    if not 0.0 < c <= math.log(2.0) + 1e-12:
        raise PosetError("lift bound needs an exponent in (0, log 2]")
    if kind == "bottom":
        f = lambda x: (1.0 - x) * c - binary_entropy(x)
        x = brentq(f, 1e-12, 0.5 - 1e-12, xtol=1e-15, rtol=8.9e-16)
        return binary_entropy(x)
    if kind == "bottom-top":
        f = lambda x: 2.0 * (1.0 - 2.0 * x) * c - 2.0 * x * math.log(2.0) - binary_entropy(2.0 * x)
        x = brentq(f, 1e-12, 0.5 - 1e-12, xtol=1e-15, rtol=8.9e-16)
        return float((1.0 - 2.0 * x) * c)
    raise PosetError("kind must be 'bottom' or 'bottom-top'")


def trivial_upper_bound(poset, family=None):
    """log(antichain count) / size."""
    if family is None:
        family = antichains(poset)
    return math.log(len(family)) / poset.n


def bounded_upper_bound(poset, family=None):
    """Upper bound for bounded posets from two-point weightings.

    Maximizes over x the minimum of the single-bottom entropy H2(x) and, for
    every subposet containing both bounds, the exponent that subposet sees
    under the two-point weighting with parameter x.
    """
    mins = poset.minimal_elements()
    maxs = poset.maximal_elements()
    if len(mins) != 1 or len(maxs) != 1 or poset.n < 2:
        raise PosetError("bounded upper bound needs distinct unique bounds")
    if family is None:
        family = antichains(poset)
    bot, top = mins[0], maxs[0]
    need = (1 << bot) | (1 << top)
    rest = poset.full_mask() & ~need
    terms = []
    sub = rest
    while True:
        q = need | sub
        a_q = len(antichains(induced_subposet(poset, q)))
        terms.append((q.bit_count(), a_q))
        if sub == 0:
            break
        sub = (sub - 1) & rest

    a_p = len(family)

    def phi(x):
        best = binary_entropy(x)
        w = 1.0 - 2.0 * x
        lx = -2.0 * xlogy(x, x)
        for size, a_q in terms:
            val = (lx - xlogy(w, w / (a_q - 2.0))) / size
            if val < best:
                best = val
        return best

    lo = max(1.0 / a_p, 1e-9)
    hi = 0.5
    res = minimize_scalar(lambda x: -phi(x), bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    candidates = [phi(lo), phi(hi), -float(res.fun)]
    return max(candidates)


def universality_band(n_elements, b=1.0):
    """Bracket for the exponent of a typical poset on n_elements elements.

    The width depends on t = ceil(b log n_elements); the constant b is a
    modelling parameter (the asymptotic statement does not pin it down).
    """
    if n_elements < 2:
        raise PosetError("universality band needs at least two elements")
    t = math.ceil(b * math.log(n_elements))
    t = max(t, 1)
    lo = math.log(2.0) / 3.0
    hi = lo + math.log(3.0 - 2.0 * 2.0 ** (-t)) / (3.0 * t)
    return lo, hi
