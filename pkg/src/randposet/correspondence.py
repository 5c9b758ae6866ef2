"""The partition picture of poset copies inside the Boolean lattice.

An order-preserving map of a pattern poset into the subset lattice of
{1..n} is the same data as an ordered partition of the ground set indexed by
the pattern's antichains. This module implements both directions of that
correspondence, the upper-shadow maps it induces on antichains, partitions
and weightings, and exact copy counting by three independent methods.

Ground subsets are bitmasks over n bits; partitions are tuples of such masks
aligned with an AntichainFamily (empty antichain last); weightings are numpy
vectors on the same index set.
"""

from __future__ import annotations

import math

import numpy as np

from .posets import (
    AntichainFamily,
    CapacityError,
    PosetError,
    antichains,
    induced_subposet,
    _bits,
)


class Partition:
    """An ordered partition of {1..n} indexed by a poset's antichains."""

    __slots__ = ("family", "n", "parts")

    def __init__(self, family, n, parts):
        parts = tuple(parts)
        if len(parts) != len(family):
            raise PosetError(
                "partition has %d parts but the family has %d antichains"
                % (len(parts), len(family))
            )
        full = (1 << n) - 1
        union = 0
        for mask in parts:
            if mask & ~full:
                raise PosetError("partition part uses ground elements outside 1..%d" % n)
            if mask & union:
                raise PosetError("partition parts are not disjoint")
            union |= mask
        if union != full:
            raise PosetError("partition parts do not cover the ground set")
        self.family = family
        self.n = n
        self.parts = parts

    def __eq__(self, other):
        return (
            isinstance(other, Partition)
            and self.family.masks == other.family.masks
            and self.n == other.n
            and self.parts == other.parts
        )

    def __repr__(self):
        return "Partition(n=%d, parts=%r)" % (self.n, self.parts)

    def is_starred(self):
        """True when every part is nonempty."""
        return all(p != 0 for p in self.parts)

    def nonempty_indices(self):
        """Indices of nonempty parts."""
        return [j for j, p in enumerate(self.parts) if p]

    def weighting(self):
        """Normalized part sizes as a vector on the antichain family."""
        if self.n == 0:
            raise PosetError("weighting of an empty ground set is undefined")
        return np.array([p.bit_count() for p in self.parts], dtype=float) / self.n


class CopyMap:
    """An order-preserving map from a pattern poset into subsets of {1..n}."""

    __slots__ = ("poset", "n", "images")

    def __init__(self, poset, n, images):
        images = tuple(images)
        if len(images) != poset.n:
            raise PosetError("expected %d images, got %d" % (poset.n, len(images)))
        full = (1 << n) - 1
        for mask in images:
            if mask & ~full:
                raise PosetError("image uses ground elements outside 1..%d" % n)
        for i in range(poset.n):
            for j in _bits(poset.above[i]):
                if images[i] & ~images[j]:
                    raise PosetError(
                        "map is not order-preserving at %s < %s"
                        % (poset.label(i), poset.label(j))
                    )
        self.poset = poset
        self.n = n
        self.images = images

    def __eq__(self, other):
        return (
            isinstance(other, CopyMap)
            and self.poset == other.poset
            and self.n == other.n
            and self.images == other.images
        )

    def __repr__(self):
        return "CopyMap(n=%d, images=%r)" % (self.n, self.images)

    def is_injective(self):
        """True when all images are distinct."""
        return len(set(self.images)) == len(self.images)

    def is_induced(self):
        """True when the map is injective and reflects incomparability."""
        if not self.is_injective():
            return False
        p = self.poset
        for i in range(p.n):
            for j in range(i + 1, p.n):
                if not p.comparable(i, j):
                    a, b = self.images[i], self.images[j]
                    if a & ~b == 0 or b & ~a == 0:
                        return False
        return True

    def restrict(self, q_mask):
        """The map restricted to the induced subposet on q_mask."""
        sub = induced_subposet(self.poset, q_mask)
        return CopyMap(sub, self.n, tuple(self.images[e] for e in sub.parent_elements))


def _down_meeting_indices(family):
    """For each pattern element, the antichain indices meeting its down-set."""
    poset = family.poset
    out = []
    for i in range(poset.n):
        dmask = poset.down_mask(i)
        sel = 0
        for j, s in enumerate(family.masks):
            if s & dmask:
                sel |= 1 << j
        out.append(sel)
    return out


def copy_of_partition(family, partition):
    """Turn a partition into the order-preserving map it encodes.

    Pattern element i receives the union of all parts whose antichain meets
    the down-set of i. Starred partitions produce induced copies.
    """
    if partition.family is not family and partition.family.masks != family.masks:
        raise PosetError("partition is indexed by a different antichain family")
    sel = _down_meeting_indices(family)
    images = []
    for i in range(family.poset.n):
        x = 0
        for j in _bits(sel[i]):
            x |= partition.parts[j]
        images.append(x)
    return CopyMap(family.poset, partition.n, images)


def partition_of_copy(family, copy):
    """Recover the partition encoding an order-preserving map.

    Inverts copy_of_partition: peel each image down to the ground elements
    first appearing at that pattern element, intersect along antichains,
    strip strict refinements, and put the leftovers in the empty-antichain
    part.
    """
    poset = family.poset
    if copy.poset != poset:
        raise PosetError("copy map belongs to a different poset")
    n = copy.n
    full = (1 << n) - 1
    fresh = []
    for i in range(poset.n):
        seen_below = 0
        for k in _bits(poset.below[i]):
            seen_below |= copy.images[k]
        fresh.append(copy.images[i] & ~seen_below)
    cores = []
    for s in family.masks:
        if s == 0:
            cores.append(0)
            continue
        z = full
        for i in _bits(s):
            z &= fresh[i]
        cores.append(z)
    parts = []
    used = 0
    for j, s in enumerate(family.masks):
        if s == 0:
            parts.append(0)
            continue
        part = cores[j]
        for l, t in enumerate(family.masks):
            if t != s and t & s == s:
                part &= ~cores[l]
        parts.append(part)
        used |= part
    empty_at = family.masks.index(0)
    parts[empty_at] = full & ~used
    return Partition(family, n, parts)


# -- shadows -----------------------------------------------------------------


def shadow_antichain(poset, q_mask, s_mask):
    """Upper shadow of an antichain into a subset of elements.

    The minimal elements, within q_mask, of everything lying at or above
    s_mask. The result is an antichain of the induced sub-order on q_mask.
    """
    if not poset.is_antichain(s_mask):
        raise PosetError("shadow input is not an antichain")
    reach = poset.upset_of(s_mask) & q_mask
    out = 0
    for i in _bits(reach):
        if not poset.below[i] & reach:
            out |= 1 << i
    return out


class ShadowMap:
    """Precomputed shadow data for one subposet of a parent family."""

    __slots__ = ("family", "q_mask", "subposet", "subfamily", "sigma")

    def __init__(self, family, q_mask, subfamily_cache=None):
        poset = family.poset
        self.family = family
        self.q_mask = q_mask
        self.subposet = induced_subposet(poset, q_mask)
        self.subfamily = antichains(self.subposet)
        local_bit = {e: k for k, e in enumerate(self.subposet.parent_elements)}
        sigma = np.empty(len(family), dtype=np.intp)
        for j, s in enumerate(family.masks):
            t = shadow_antichain(poset, q_mask, s)
            local = 0
            for i in _bits(t):
                local |= 1 << local_bit[i]
            sigma[j] = self.subfamily.position(local)
        self.sigma = sigma

    def push_weighting(self, alpha):
        """Accumulate a parent weighting onto the subposet's antichains."""
        alpha = np.asarray(alpha, dtype=float)
        return np.bincount(self.sigma, weights=alpha, minlength=len(self.subfamily))

    def push_partition(self, partition):
        """Accumulate a parent partition onto the subposet's antichains."""
        parts = [0] * len(self.subfamily)
        for j, mask in enumerate(partition.parts):
            parts[self.sigma[j]] |= mask
        return Partition(self.subfamily, partition.n, parts)


def shadow_weighting(family, q_mask, alpha):
    """Weighting induced on the subposet q_mask by a parent weighting."""
    return ShadowMap(family, q_mask).push_weighting(alpha)


def shadow_partition(family, q_mask, partition):
    """Partition induced on the subposet q_mask by a parent partition."""
    return ShadowMap(family, q_mask).push_partition(partition)


# -- exact copy counting ------------------------------------------------------

_MODES = ("weak", "injective", "induced")


def surjection_count(n, k):
    """Number of surjections from an n-set onto a k-set."""
    if k < 0:
        raise PosetError("negative part count")
    total = 0
    for i in range(k + 1):
        total += (-1) ** i * math.comb(k, i) * (k - i) ** n
    return total


def starred_count(m, n):
    """Number of ordered partitions of {1..n} into m labelled nonempty parts."""
    return surjection_count(n, m)


def _check_mode(mode):
    if mode not in _MODES:
        raise PosetError("mode must be one of %s" % (_MODES,))


def count_copies(pattern, n, mode="injective", method="grouped", cap=10 ** 8, family=None):
    """Count order-preserving maps of a pattern into subsets of {1..n}.

    Modes: "weak" counts all order-preserving maps, "injective" those with
    pairwise distinct images, "induced" those that also reflect
    incomparability. Methods "grouped", "scan" and "backtrack" are
    independent computations that must agree; "grouped" classifies
    empty-part patterns once and multiplies by surjection counts, "scan"
    enumerates every partition, "backtrack" embeds directly.
    """
    _check_mode(mode)
    if family is None:
        family = antichains(pattern)
    m = len(family)
    if method == "grouped":
        return _count_grouped(pattern, family, n, mode, cap)
    if method == "scan":
        if m ** n > cap:
            raise CapacityError("partition scan of size %d^%d exceeds cap" % (m, n))
        total = 0
        for _, keep in _scan_partitions(pattern, family, n, mode):
            total += int(keep.sum())
        return total
    if method == "backtrack":
        return _count_backtrack(pattern, n, mode)
    raise PosetError("unknown method %r" % method)


def _count_grouped(pattern, family, n, mode, cap):
    """Copy count via empty-part pattern classification."""
    m = len(family)
    if m > 26:
        raise CapacityError("grouped count over 2^%d nonempty patterns is too large" % m)
    sel = _down_meeting_indices(family)
    pairs = []
    for i in range(pattern.n):
        for k in range(i + 1, pattern.n):
            pairs.append((i, k, pattern.comparable(i, k)))
    per_size = [0] * (m + 1)
    for t in range(1 << m):
        ok = True
        if mode != "weak":
            for i, k, comp in pairs:
                xi = sel[i] & t
                xk = sel[k] & t
                if xi == xk:
                    ok = False
                    break
                if mode == "induced" and not comp and (xi & ~xk == 0 or xk & ~xi == 0):
                    ok = False
                    break
        if ok:
            per_size[t.bit_count()] += 1
    total = 0
    for size, ways in enumerate(per_size):
        if ways:
            total += ways * surjection_count(n, size)
    return total


def _scan_partitions(pattern, family, n, mode, chunk=1 << 16):
    """Yield (image-set matrix, keep mask) over all partitions, chunked.

    Enumerates [m]^[n] as base-m digit strings; each row of the image matrix
    holds the map's images as bitmasks; ``keep`` flags rows passing the mode
    filter.
    """
    m = len(family)
    sel = _down_meeting_indices(family)
    sel_lists = [list(_bits(s)) for s in sel]
    total = m ** n
    pow2 = (1 << np.arange(n, dtype=np.int64)) if n else np.zeros(0, dtype=np.int64)
    powm = [m ** e for e in range(n + 1)]
    start = 0
    while start < total:
        stop = min(start + chunk, total)
        idx = np.arange(start, stop, dtype=np.int64)
        digits = np.empty((stop - start, n), dtype=np.int64)
        for pos in range(n):
            digits[:, pos] = (idx // powm[pos]) % m
        part_masks = np.zeros((stop - start, m), dtype=np.int64)
        for j in range(m):
            part_masks[:, j] = (digits == j) @ pow2
        images = np.zeros((stop - start, pattern.n), dtype=np.int64)
        for i in range(pattern.n):
            if sel_lists[i]:
                images[:, i] = part_masks[:, sel_lists[i]].sum(axis=1)
        keep = np.ones(stop - start, dtype=bool)
        if mode != "weak":
            for i in range(pattern.n):
                for k in range(i + 1, pattern.n):
                    xi = images[:, i]
                    xk = images[:, k]
                    keep &= xi != xk
                    if mode == "induced" and not pattern.comparable(i, k):
                        keep &= (xi & ~xk) != 0
                        keep &= (xk & ~xi) != 0
        yield images, keep
        start = stop


def _count_backtrack(pattern, n, mode):
    """Copy count by direct embedding search over subset images."""
    order = sorted(range(pattern.n), key=lambda i: pattern.below[i].bit_count())
    full = (1 << n) - 1
    images = {}

    def rec(k):
        if k == len(order):
            return 1
        i = order[k]
        lower = 0
        for j in images:
            if pattern.lt(j, i):
                lower |= images[j]
        free = full & ~lower
        total = 0
        sub = free
        while True:
            x = lower | sub
            ok = True
            if mode != "weak":
                for j, xj in images.items():
                    if x == xj:
                        ok = False
                        break
                    if mode == "induced" and not pattern.comparable(i, j):
                        if x & ~xj == 0 or xj & ~x == 0:
                            ok = False
                            break
            if ok:
                images[i] = x
                total += rec(k + 1)
                del images[i]
            if sub == 0:
                break
            sub = (sub - 1) & free
        return total

    return rec(0)


def iter_copy_images(pattern, n, mode, cap=10 ** 9, family=None):
    """Yield the image subset tuple of every copy found by the partition scan.

    Tuples are sorted; the same image set may appear several times when the
    pattern has automorphisms. Guard: m^n must not exceed cap.
    """
    _check_mode(mode)
    if family is None:
        family = antichains(pattern)
    m = len(family)
    if m ** n > cap:
        raise CapacityError("partition scan of size %d^%d exceeds cap" % (m, n))
    for images, keep in _scan_partitions(pattern, family, n, mode):
        for row in images[keep]:
            yield tuple(sorted(int(v) for v in row))


# -- weighted partition counting ---------------------------------------------


def nearest_composition(alpha, n):
    """Round a weighting to an integer composition of n, largest remainder."""
    alpha = np.asarray(alpha, dtype=float)
    base = np.floor(alpha * n).astype(int)
    short = n - int(base.sum())
    remainders = alpha * n - base
    for j in sorted(range(len(alpha)), key=lambda t: (-remainders[t], t))[:short]:
        base[j] += 1
    return tuple(int(v) for v in base)


def count_weighted_partitions(alpha, n, eps):
    """Count partitions whose normalized part sizes lie within eps of alpha.

    Returns (exact count, entropy rate): the exact multinomial sum over all
    integer compositions of n inside the eps-box around n*alpha, and the
    first-order exponent n*H(alpha) it approximates.
    """
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < -1e-12):
        raise PosetError("weighting has a negative coordinate")
    if abs(float(alpha.sum()) - 1.0) > 1e-9:
        raise PosetError("weighting does not sum to 1")
    m = len(alpha)
    lo = [max(0, math.ceil(n * (a - eps) - 1e-9)) for a in alpha]
    hi = [min(n, math.floor(n * (a + eps) + 1e-9)) for a in alpha]
    if any(l > h for l, h in zip(lo, hi)):
        raise PosetError("no integer composition of %d lies within eps of alpha" % n)
    suffix_lo = [0] * (m + 1)
    suffix_hi = [0] * (m + 1)
    for j in range(m - 1, -1, -1):
        suffix_lo[j] = suffix_lo[j + 1] + lo[j]
        suffix_hi[j] = suffix_hi[j + 1] + hi[j]

    def rec(j, remaining, ways):
        if j == m:
            return ways if remaining == 0 else 0
        total = 0
        for k in range(lo[j], hi[j] + 1):
            rest = remaining - k
            if rest < suffix_lo[j + 1] or rest > suffix_hi[j + 1]:
                continue
            total += rec(j + 1, rest, ways * math.comb(remaining, k))
        return total

    count = rec(0, n, 1)
    if count == 0:
        raise PosetError("no integer composition of %d lies within eps of alpha" % n)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(alpha > 0, -alpha * np.log(np.where(alpha > 0, alpha, 1.0)), 0.0)
    return count, float(n * terms.sum())
