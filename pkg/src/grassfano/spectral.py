"""Bounding spectral sequences by integer interval propagation.

Every E1 entry, E-infinity entry and abutment is a variable with an integer
interval.  Spectral sequences contribute only constraints that hold for any
choice of differentials, so every value that collapses is forced.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor


class Inconsistent(Exception):
    pass


class System:
    def __init__(self):
        self.lo = []
        self.hi = []
        self.names = []
        self.cons = []  # (coeffs: dict var -> int, kind '=' | '>=', rhs)

    def var(self, name, lo=0, hi=None):
        self.names.append(name)
        self.lo.append(lo)
        self.hi.append(hi if hi is not None else 10 ** 12)
        return len(self.names) - 1

    def const(self, value, name="const"):
        return self.var(name, value, value)

    def eq(self, coeffs, rhs=0):
        self.cons.append((_clean(coeffs), "=", rhs))

    def ge(self, coeffs, rhs=0):
        self.cons.append((_clean(coeffs), ">=", rhs))

    def fixed(self, v):
        return self.lo[v] == self.hi[v]

    def bounds(self, v):
        return self.lo[v], self.hi[v]

    def copy(self):
        s = System()
        s.lo, s.hi, s.names = list(self.lo), list(self.hi), self.names
        s.cons = self.cons
        return s

    # -- propagation
    def _tighten(self, v, lo, hi):
        changed = False
        if lo > self.lo[v]:
            self.lo[v] = lo
            changed = True
        if hi < self.hi[v]:
            self.hi[v] = hi
            changed = True
        if self.lo[v] > self.hi[v]:
            raise Inconsistent(self.names[v])
        return changed

    def _propagate_one(self, coeffs, kind, rhs):
        changed = False
        mins, maxs = {}, {}
        for v, c in coeffs.items():
            a, b = c * self.lo[v], c * self.hi[v]
            mins[v], maxs[v] = min(a, b), max(a, b)
        smin, smax = sum(mins.values()), sum(maxs.values())
        if smax < rhs or (kind == "=" and smin > rhs):
            raise Inconsistent("constraint violated")
        for v, c in coeffs.items():
            # c*v >= rhs - (smax - maxs[v])
            low = rhs - (smax - maxs[v])
            if c > 0:
                nlo, nhi = ceil(Fraction(low, c)), self.hi[v]
            else:
                nlo, nhi = self.lo[v], floor(Fraction(low, c))
            if kind == "=":
                up = rhs - (smin - mins[v])
                if c > 0:
                    nhi = min(nhi, floor(Fraction(up, c)))
                else:
                    nlo = max(nlo, ceil(Fraction(up, c)))
            if self._tighten(v, nlo, nhi):
                changed = True
        return changed

    def _derived_rows(self):
        """Reduced row echelon form of the equalities with fixed variables
        substituted; every row is again a valid equality."""
        rows = []
        for coeffs, kind, rhs in self.cons:
            if kind != "=":
                continue
            row = {}
            r = Fraction(rhs)
            for v, c in coeffs.items():
                if self.fixed(v):
                    r -= c * self.lo[v]
                else:
                    row[v] = Fraction(c)
            if row:
                rows.append((row, r))
        pivots = []
        reduced = []
        for row, r in rows:
            row = dict(row)
            for pv, prow, pr in reduced:
                if pv in row:
                    f = row[pv]
                    for v, c in prow.items():
                        row[v] = row.get(v, 0) - f * c
                        if row[v] == 0:
                            del row[v]
                    r -= f * pr
            if not row:
                if r != 0:
                    raise Inconsistent("linear system")
                continue
            pv = min(row)
            f = row[pv]
            row = {v: c / f for v, c in row.items()}
            r = r / f
            for i, (qv, qrow, qr) in enumerate(reduced):
                if pv in qrow:
                    g = qrow[pv]
                    nrow = dict(qrow)
                    for v, c in row.items():
                        nrow[v] = nrow.get(v, 0) - g * c
                        if nrow[v] == 0:
                            del nrow[v]
                    reduced[i] = (qv, nrow, qr - g * r)
            reduced.append((pv, row, r))
            pivots.append(pv)
        out = []
        for _, row, r in reduced:
            den = 1
            for c in list(row.values()) + [r]:
                den = den * c.denominator // _gcd(den, c.denominator)
            out.append(({v: int(c * den) for v, c in row.items()}, "=", int(r * den)))
        return out

    def propagate(self):
        while True:
            changed = False
            for con in self.cons:
                if self._propagate_one(*con):
                    changed = True
            if not changed:
                for con in self._derived_rows():
                    if self._propagate_one(*con):
                        changed = True
            if not changed:
                return

    def probe(self, targets, max_domain=64):
        """Remove values of `targets` whose assignment makes the system infeasible."""
        changed = True
        while changed:
            changed = False
            for v in targets:
                if self.fixed(v) or self.hi[v] - self.lo[v] > max_domain:
                    continue
                ok = []
                for val in range(self.lo[v], self.hi[v] + 1):
                    trial = self.copy()
                    try:
                        trial._tighten(v, val, val)
                        trial.propagate()
                    except Inconsistent:
                        continue
                    ok.append(val)
                if not ok:
                    raise Inconsistent(self.names[v])
                if ok[0] > self.lo[v] or ok[-1] < self.hi[v]:
                    self.lo[v], self.hi[v] = ok[0], ok[-1]
                    self.propagate()
                    changed = True


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _clean(coeffs):
    out = {}
    for v, c in coeffs.items():
        if c:
            out[v] = out.get(v, 0) + c
    return {v: c for v, c in out.items() if c}


class SpectralSequence:
    """E1 entries at (column, total degree); differentials raise both.

    `entries` maps (column, total) -> E1 variable.  Abutment variables
    H^t are created for total degrees in [tmin, tmax]; others are zero.
    """

    def __init__(self, system: System, name, entries: dict, tmin, tmax):
        self.S = system
        self.name = name
        self.entries = dict(entries)
        self.einf = {}
        for (c, t), v in sorted(self.entries.items()):
            w = system.var(f"{name}:Einf[{c},{t}]", 0, system.hi[v])
            self.einf[(c, t)] = w
            system.ge({v: 1, w: -1}, 0)
            if t < tmin or t > tmax:
                system._tighten(w, 0, 0)
        self.abut = {}
        for t in range(tmin, tmax + 1):
            h = system.var(f"{name}:H[{t}]", 0)
            self.abut[t] = h
            terms = {h: 1}
            for (c, tt), w in self.einf.items():
                if tt == t:
                    terms[w] = terms.get(w, 0) - 1
            system.eq(terms, 0)
        self._structural = []

    def add_structure(self):
        """Neighbour bounds and per-component Euler characteristics; called
        after bounds change so that vanished entries split components."""
        S = self.S
        live = {x for x, v in self.entries.items() if S.hi[v] > 0}
        nbrs = {x: [] for x in live}
        for x in live:
            for y in live:
                if y[1] == x[1] + 1 and y[0] > x[0]:
                    nbrs[x].append(y)
                    nbrs[y].append(x)
        sig = []
        for x in sorted(live):
            v, w = self.entries[x], self.einf[x]
            terms = {w: 1, v: -1}
            for y in nbrs[x]:
                u = self.entries[y]
                terms[u] = terms.get(u, 0) + 1
            sig.append((terms, ">=", 0))
        seen = set()
        for x in sorted(live):
            if x in seen:
                continue
            comp, stack = [], [x]
            seen.add(x)
            while stack:
                y = stack.pop()
                comp.append(y)
                for z in nbrs[y]:
                    if z not in seen:
                        seen.add(z)
                        stack.append(z)
            terms = {}
            for y in comp:
                s = -1 if y[1] % 2 else 1
                terms[self.entries[y]] = terms.get(self.entries[y], 0) + s
                terms[self.einf[y]] = terms.get(self.einf[y], 0) - s
            sig.append((_clean(terms), "=", 0))
        for x in self.entries:
            if x not in live:
                S._tighten(self.einf[x], 0, 0)
        new = [c for c in sig if c not in self._structural]
        S.cons.extend(new)
        self._structural.extend(new)
        return bool(new)
