"""Arrow relations, Ramsey exponent bounds, and CNF avoidance encodings.

A host poset arrows a pattern pair when every red/blue colouring of its
elements leaves a red copy of the first pattern or a blue copy of the
second (weak subposet copies by default). This module decides arrows by
exhaustive colouring search with incremental witness caching, bounds the
Ramsey threshold exponents via product and tower constructions plus a
catalog of known pairs, and reduces monochromatic-copy avoidance in subset
lattices to CNF solved by an embedded DPLL solver.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .posets import (
    CapacityError,
    Poset,
    PosetError,
    antichains,
    boolean_lattice,
    chain,
    contains_copy,
    is_isomorphic,
    layered,
    lex_product,
    poset_key,
    reverse,
    tower,
    vee,
    wedge,
    wedge_prime,
    y_poset,
    y_prime,
    y_double_prime,
    binary_tree_2,
    double_diamond,
    diamond,
)
from .correspondence import iter_copy_images
from . import threshold

ARROW_SIZE_CAP = 24
SCAN_GUARD = 10 ** 9


def _family(patterns):
    """Normalize a poset or an iterable of posets to a list."""
    if isinstance(patterns, Poset):
        return [patterns]
    out = list(patterns)
    if not out or not all(isinstance(p, Poset) for p in out):
        raise PosetError("expected a poset or a nonempty list of posets")
    return out


class _SideSearcher:
    """Incremental search for a copy of any family member within one colour."""

    __slots__ = ("host", "patterns", "induced", "found", "witness")

    def __init__(self, host, patterns, induced):
        self.host = host
        self.patterns = patterns
        self.induced = induced
        self.found = False
        self.witness = 0

    def recompute(self, mask):
        self.found = False
        self.witness = 0
        for pat in self.patterns:
            hit = contains_copy(self.host, pat, induced=self.induced, within=mask)
            if hit is not None:
                self.found = True
                for v in hit:
                    self.witness |= 1 << v
                return True
        return False

    def element_gained(self, mask):
        if not self.found:
            self.recompute(mask)

    def element_lost(self, mask, element_bit):
        if self.found and self.witness & element_bit:
            self.recompute(mask)


def arrows(host, first, second, induced=False):
    """Decide whether every 2-colouring of the host yields a monochromatic copy.

    ``first`` and ``second`` may each be a poset or a family (list) of
    posets; colour 1 hosts the first, colour 2 the second. Returns
    (True, None) or (False, witness) where the witness is a tuple assigning
    1 or 2 to each host element.
    """
    firsts = _family(first)
    seconds = _family(second)
    n = host.n
    if n > ARROW_SIZE_CAP:
        raise CapacityError("host has %d elements, above the exhaustive cap %d" % (n, ARROW_SIZE_CAP))
    full = host.full_mask()
    side1 = _SideSearcher(host, firsts, induced)
    side2 = _SideSearcher(host, seconds, induced)
    # Colour mask: set bit means colour 1. Start all colour 2.
    mask = 0
    side1.recompute(mask)
    side2.recompute(full)
    if not side1.found and not side2.found:
        return False, tuple(2 for _ in range(n))
    # Gray-code walk over the remaining colourings.
    for step in range(1, 1 << n):
        flip = (step ^ (step >> 1)) ^ ((step - 1) ^ ((step - 1) >> 1))
        mask ^= flip
        if mask & flip:
            side1.element_gained(mask)
            side2.element_lost(full & ~mask, flip)
        else:
            side2.element_gained(full & ~mask)
            side1.element_lost(mask, flip)
        if not side1.found and not side2.found:
            colouring = tuple(1 if mask >> i & 1 else 2 for i in range(n))
            return False, colouring
    return True, None


def verify_colouring(host, colouring, first, second, induced=False):
    """Check a full colouring for monochromatic copies.

    Returns (True, None) when neither colour class contains a copy of its
    forbidden family, else (False, (side, elements)).
    """
    if len(colouring) != host.n or any(c not in (1, 2) for c in colouring):
        raise PosetError("colouring must assign 1 or 2 to every host element")
    mask1 = 0
    for i, c in enumerate(colouring):
        if c == 1:
            mask1 |= 1 << i
    for side, patterns, mask in (
        (1, _family(first), mask1),
        (2, _family(second), host.full_mask() & ~mask1),
    ):
        for pat in patterns:
            hit = contains_copy(host, pat, induced=induced, within=mask)
            if hit is not None:
                return False, (side, tuple(sorted(hit)))
    return True, None


def ramsey_number(first, second, n_max=4, induced=False):
    """Smallest lattice dimension whose subset lattice arrows the pair.

    Uses the exhaustive arrow search for dimensions up to 4 and the CNF
    route above that; returns None when no dimension up to n_max works.
    """
    for dim in range(1, n_max + 1):
        host = boolean_lattice(dim)
        if dim <= 4:
            ok, _ = arrows(host, first, second, induced=induced)
        else:
            cnf = _pair_avoidance_cnf(host, _family(first), _family(second), induced)
            res = solve_cnf(cnf)
            if res.status == "unknown":
                raise CapacityError("embedded solver gave up at dimension %d" % dim)
            ok = res.status == "unsat"
        if ok:
            return dim
    return None


# -- copy enumeration in subset lattices ---------------------------------------


def _boolean_dimension(host):
    """The dimension d when the host is the subset lattice in mask order."""
    n = host.n
    d = n.bit_length() - 1
    if n != 1 << d:
        raise PosetError("host is not a subset lattice (size is not a power of two)")
    if host != boolean_lattice(d):
        raise PosetError("host is not the subset lattice in mask order")
    return d


def enumerate_pattern_copies(host, pattern, mode="all-weak", cap=SCAN_GUARD):
    """All copies of a pattern in a subset-lattice host, as sorted image tuples.

    Modes: "all-weak" (injective order-preserving images), "all-induced"
    (also order-reflecting), "subcube" (images of whole coordinate subcubes;
    the pattern must itself be a subset lattice). Duplicate images arising
    from pattern automorphisms are removed.
    """
    d = _boolean_dimension(host)
    if mode == "subcube":
        k = pattern.n.bit_length() - 1
        if pattern.n != 1 << k or not is_isomorphic(pattern, boolean_lattice(k)):
            raise PosetError("subcube mode needs a subset-lattice pattern")
        images = set()
        coords = list(range(d))
        for free in itertools.combinations(coords, k):
            free_mask = 0
            for t in free:
                free_mask |= 1 << t
            fixed = [t for t in coords if t not in free]
            for bits in range(1 << len(fixed)):
                base = 0
                for pos, t in enumerate(fixed):
                    if bits >> pos & 1:
                        base |= 1 << t
                sub = free_mask
                image = []
                while True:
                    image.append(base | sub)
                    if sub == 0:
                        break
                    sub = (sub - 1) & free_mask
                images.add(tuple(sorted(image)))
        return sorted(images)
    if mode == "all-weak":
        scan_mode = "injective"
    elif mode == "all-induced":
        scan_mode = "induced"
    else:
        raise PosetError("mode must be subcube, all-weak or all-induced")
    family = antichains(pattern)
    if len(family) ** d > cap:
        raise CapacityError(
            "enumeration over %d^%d partitions exceeds the guard" % (len(family), d)
        )
    images = set(iter_copy_images(pattern, d, scan_mode, cap=cap, family=family))
    return sorted(images)


def count_pattern_copies_direct(host, pattern, mode="all-weak"):
    """Independent copy count by backtracking embeddings, deduplicated."""
    from .posets import _embeddings

    induced = mode == "all-induced"
    if mode not in ("all-weak", "all-induced"):
        raise PosetError("mode must be all-weak or all-induced")
    found = _embeddings(pattern, host, induced=induced, find_all=True)
    return len({tuple(sorted(t)) for t in found})


# -- CNF machinery --------------------------------------------------------------


@dataclass
class CnfFormula:
    """A CNF over one boolean variable per host element.

    Variables are 1-based host element indices; a positive literal means the
    element gets colour 1. ``provenance`` aligns with ``clauses`` and names
    the copy that produced each clause.
    """

    num_vars: int
    clauses: list
    provenance: list = field(default_factory=list)

    def to_dimacs(self):
        """Standard DIMACS text with a comment naming each clause pair's copy."""
        lines = ["p cnf %d %d" % (self.num_vars, len(self.clauses))]
        emitted_comment = set()
        for idx, clause in enumerate(self.clauses):
            tag = self.provenance[idx] if idx < len(self.provenance) else None
            if tag is not None and tag not in emitted_comment:
                lines.append("c copy %s" % (",".join(str(v) for v in tag)))
                emitted_comment.add(tag)
            lines.append(" ".join(str(l) for l in clause) + " 0")
        return "\n".join(lines) + "\n"


def parse_dimacs(text):
    """Read a DIMACS CNF file back into a CnfFormula (comments dropped)."""
    num_vars = None
    clauses = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise PosetError("bad DIMACS header: %r" % line)
            num_vars = int(parts[2])
            continue
        lits = [int(v) for v in line.split()]
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        if lits:
            clauses.append(tuple(lits))
    if num_vars is None:
        num_vars = max((abs(l) for c in clauses for l in c), default=0)
    return CnfFormula(num_vars, clauses, [None] * len(clauses))


def encode_avoidance(host, pattern, mode="all-weak"):
    """CNF satisfiable iff a 2-colouring of the host avoids monochromatic copies.

    For each enumerated copy two clauses are added: at least one element of
    the copy is coloured 2 (all-negative) and at least one is coloured 1
    (all-positive).
    """
    copies = enumerate_pattern_copies(host, pattern, mode=mode)
    clauses = []
    provenance = []
    for image in copies:
        tag = tuple(image)
        clauses.append(tuple(-(v + 1) for v in image))
        provenance.append(tag)
        clauses.append(tuple(v + 1 for v in image))
        provenance.append(tag)
    return CnfFormula(host.n, clauses, provenance)


def _all_copy_images(host, patterns, induced):
    """Deduplicated copy images of any family member in an arbitrary host."""
    from .posets import _embeddings

    images = set()
    for pat in patterns:
        for t in _embeddings(pat, host, induced=induced, find_all=True):
            images.add(tuple(sorted(t)))
    return sorted(images)


def _pair_avoidance_cnf(host, firsts, seconds, induced):
    """CNF for avoiding first-family copies in colour 1 and second in colour 2."""
    clauses = []
    provenance = []
    for image in _all_copy_images(host, firsts, induced):
        clauses.append(tuple(-(v + 1) for v in image))
        provenance.append(tuple(image))
    for image in _all_copy_images(host, seconds, induced):
        clauses.append(tuple(v + 1 for v in image))
        provenance.append(tuple(image))
    return CnfFormula(host.n, clauses, provenance)


@dataclass
class SatResult:
    """Outcome of the embedded solver: sat, unsat, or unknown on timeout."""

    status: str
    assignment: dict = None


def solve_cnf(cnf, time_budget=None):
    """Embedded DPLL with watched literals and deterministic branching.

    Branches on the lowest-index unassigned variable, trying True first;
    backtracking is chronological. A time budget (seconds) turns expiry into
    an explicit "unknown" result. Satisfying assignments are verified
    against every clause before being returned.
    """
    deadline = time.monotonic() + time_budget if time_budget else None
    nv = cnf.num_vars
    clauses = []
    for c in cnf.clauses:
        lits = tuple(dict.fromkeys(c))
        for l in lits:
            if l == 0 or abs(l) > nv:
                raise PosetError("literal %d out of range" % l)
        clauses.append(lits)

    watch_of = {}
    watched = []
    init_units = []
    for ci, c in enumerate(clauses):
        if len(c) == 0:
            return SatResult("unsat")
        if any(-l in c for l in c):
            watched.append(None)
            continue
        if len(c) == 1:
            init_units.append(c[0])
            watched.append(None)
            continue
        watched.append([c[0], c[1]])
        watch_of.setdefault(c[0], []).append(ci)
        watch_of.setdefault(c[1], []).append(ci)

    val = [None] * (nv + 1)
    trail = []

    def lit_value(l):
        v = val[abs(l)]
        if v is None:
            return None
        return v if l > 0 else not v

    def enqueue(l, kind):
        val[abs(l)] = l > 0
        trail.append((l, kind))

    ticks = 0

    def propagate(start):
        nonlocal ticks
        i = start
        while i < len(trail):
            lit = trail[i][0]
            i += 1
            ticks += 1
            false_lit = -lit
            pending = watch_of.get(false_lit, ())
            kept = []
            conflict = False
            for pos, ci in enumerate(pending):
                pair = watched[ci]
                other = pair[0] if pair[1] == false_lit else pair[1]
                if lit_value(other) is True:
                    kept.append(ci)
                    continue
                repl = None
                for cand in clauses[ci]:
                    if cand != other and cand != false_lit and lit_value(cand) is not False:
                        repl = cand
                        break
                if repl is not None:
                    pair[0 if pair[0] == false_lit else 1] = repl
                    watch_of.setdefault(repl, []).append(ci)
                    continue
                kept.append(ci)
                ov = lit_value(other)
                if ov is None:
                    enqueue(other, "implied")
                elif ov is False:
                    kept.extend(pending[pos + 1 :])
                    conflict = True
                    break
            watch_of[false_lit] = kept
            if conflict:
                return True
        return False

    def backtrack():
        while trail:
            lit, kind = trail.pop()
            val[abs(lit)] = None
            if kind == "decision":
                enqueue(-lit, "flipped")
                return True
        return False

    for u in init_units:
        v = lit_value(u)
        if v is False:
            return SatResult("unsat")
        if v is None:
            enqueue(u, "implied")
    pos = 0
    if propagate(0):
        while True:
            if not backtrack():
                return SatResult("unsat")
            if not propagate(len(trail) - 1):
                break

    next_var = 1
    while True:
        if deadline is not None and time.monotonic() > deadline:
            return SatResult("unknown")
        while next_var <= nv and val[next_var] is not None:
            next_var += 1
        if next_var > nv:
            break
        enqueue(next_var, "decision")
        while propagate(len(trail) - 1):
            if not backtrack():
                return SatResult("unsat")
        next_var = 1

    assignment = {v: bool(val[v]) for v in range(1, nv + 1)}
    for c in clauses:
        if not any((assignment[abs(l)] if l > 0 else not assignment[abs(l)]) for l in c):
            raise PosetError("internal error: solver produced a non-satisfying assignment")
    return SatResult("sat", assignment)


def assignment_to_colouring(assignment, n):
    """Map a SAT assignment (var -> bool) to a 1/2 colouring tuple."""
    return tuple(1 if assignment.get(i + 1, True) else 2 for i in range(n))


# -- exponent bounds -------------------------------------------------------------


@dataclass
class RamseyBoundsReport:
    """Bracket for the Ramsey threshold exponents of a pattern pair."""

    pair: tuple
    lower: float = None
    lower_source: str = ""
    upper: float = None
    upper_source: str = ""
    exact: float = None
    notes: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "pair": list(self.pair),
            "lower": self.lower,
            "lower_source": self.lower_source,
            "upper": self.upper,
            "upper_source": self.upper_source,
            "exact": self.exact,
            "notes": list(self.notes),
        }


_CSTAR_CACHE = {}


def _cstar(poset, name):
    key = poset_key(poset)
    hit = _CSTAR_CACHE.get(key)
    if hit is None:
        hit = threshold.c_star(poset, name=name)
        _CSTAR_CACHE[key] = hit
    return hit


def _chain_length(poset):
    """The length t when the poset is a t-chain, else None."""
    t = poset.n
    if is_isomorphic(poset, chain(t)):
        return t
    return None


def _pair_variants(p, q):
    """The pattern pairs equivalent to (p, q) by colour swap and reversal."""
    rp, rq = reverse(p), reverse(q)
    return [(p, q), (q, p), (rp, rq), (rq, rp)]


def exponent_bounds(first, second, h_poset=None, size_cap=threshold.DEFAULT_SIZE_CAP):
    """Best known bracket for the Ramsey threshold exponents of a pair.

    Combines the generic constructions (lexicographic product host for the
    lower bound, tower colouring for the upper bound) with the catalog of
    known pairs; each bound carries a provenance string naming the
    construction poset. Families are supported for the {V, wedge} results.
    """
    firsts = _family(first)
    seconds = _family(second)
    lower_cands = []
    upper_cands = []
    notes = []
    exact = None

    def pname(patterns):
        if len(patterns) == 1:
            return "poset(n=%d)" % patterns[0].n
        return "family(%s)" % ",".join("n=%d" % p.n for p in patterns)

    if len(firsts) == 1 and len(seconds) == 1:
        p, q = firsts[0], seconds[0]
        if p.n * q.n <= size_cap:
            rep = _cstar(lex_product(p, q), "lex-product host")
            lower_cands.append((rep.value, "lexicographic product host"))
        else:
            notes.append("lexicographic product too large for the exponent cap")
        for a, b in ((p, q), (q, p)):
            if len(a.maximal_elements()) == 1 and len(b.minimal_elements()) == 1:
                rep = _cstar(tower(a, b), "tower colouring")
                upper_cands.append((rep.value, "tower colouring"))
                break
        else:
            notes.append("tower undefined (no unique max/min pairing)")

        for pp, qq in _pair_variants(p, q):
            s = _chain_length(pp)
            t = _chain_length(qq)
            if s is not None and t is not None:
                val = _cstar(chain(s + t - 1), "chain host").value
                exact = val
                lower_cands.append((val, "chain pigeonhole (exact)"))
                upper_cands.append((val, "chain pigeonhole (exact)"))
                break
            if is_isomorphic(pp, vee()) and is_isomorphic(qq, vee()):
                val = _cstar(binary_tree_2(), "binary tree host").value
                exact = val
                lower_cands.append((val, "depth-2 binary tree (exact)"))
                upper_cands.append((val, "depth-2 binary tree (exact)"))
                break
            if s == 2 and is_isomorphic(qq, vee()):
                lower_cands.append((_cstar(y_prime(), "Y'").value, "Y-prime host"))
                upper_cands.append((_cstar(y_poset(), "Y").value, "Y colouring"))
                break
            if is_isomorphic(pp, wedge()) and is_isomorphic(qq, vee()):
                lower_cands.append((_cstar(layered([2, 3, 2]), "C(2,3,2)").value, "C(2,3,2) host"))
                upper_cands.append((_cstar(layered([2, 1, 2]), "C(2,1,2)").value, "C(2,1,2) colouring"))
                break
            if s == 3 and is_isomorphic(qq, vee()):
                lower_cands.append((_cstar(y_double_prime(), "Y''").value, "Y-double-prime host"))
                upper_cands.append((_cstar(layered([1, 1, 1, 2]), "C(1,1,1,2)").value, "C(1,1,1,2) colouring"))
                break
            if is_isomorphic(pp, diamond()) and t == 2:
                lower_cands.append((_cstar(double_diamond(), "DD").value, "double diamond host"))
                upper_cands.append((_cstar(layered([1, 1, 2, 1]), "C(1,1,2,1)").value, "C(1,1,2,1) colouring"))
                break
            if is_isomorphic(pp, diamond()) and is_isomorphic(qq, diamond()):
                upper_cands.append(
                    (_cstar(layered([1, 2, 1, 2, 1]), "C(1,2,1,2,1)").value, "C(1,2,1,2,1) colouring")
                )
                if h_poset is not None:
                    lower_cands.append((_cstar(h_poset, "user host").value, "user-supplied host"))
                else:
                    notes.append("lower bound host unavailable (supply it as a poset file)")
                break
    else:
        def is_v_wedge_family(patterns):
            return (
                len(patterns) == 2
                and any(is_isomorphic(p, vee()) for p in patterns)
                and any(is_isomorphic(p, wedge()) for p in patterns)
            )

        fam1 = is_v_wedge_family(firsts)
        fam2 = is_v_wedge_family(seconds)
        if fam1 and fam2:
            lower_cands.append((_cstar(layered([2, 1, 2]), "C(2,1,2)").value, "C(2,1,2) host"))
        single = None
        if fam1 and len(seconds) == 1:
            single = seconds[0]
        elif fam2 and len(firsts) == 1:
            single = firsts[0]
        if single is not None and _chain_length(single) == 2:
            upper_cands.append((_cstar(wedge_prime(), "wedge'").value, "wedge-prime colouring"))

    report = RamseyBoundsReport(pair=(pname(firsts), pname(seconds)), notes=notes)
    if lower_cands:
        report.lower, report.lower_source = max(lower_cands, key=lambda t: t[0])
    if upper_cands:
        report.upper, report.upper_source = min(upper_cands, key=lambda t: t[0])
    if exact is not None:
        report.exact = exact
    elif (
        report.lower is not None
        and report.upper is not None
        and report.upper - report.lower <= 1e-9
    ):
        report.exact = (report.lower + report.upper) / 2.0
    if (
        report.lower is not None
        and report.upper is not None
        and report.lower > report.upper + 1e-9
    ):
        report.notes.append("bound sources disagree beyond tolerance (kept verbatim)")
    return report
