"""Finite causal sites: partial orders of spacetime points and region operations.

A site is a finite set of named points with a reflexive, antisymmetric,
transitive "precedes or equals" relation.  Regions are point subsets; the
operations here compute causal pasts, exclusive pasts, joint/mutual pasts
and spacelike separation, which is all the causal structure the checkers
consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class SiteError(ValueError):
    """Invalid site construction or region usage."""


class CausalSite:
    """Finite partial order of spacetime points.

    ``relations`` lists pairs (x, y) meaning x precedes y (strictly or not);
    the constructor takes the reflexive-transitive closure and rejects any
    cycle between distinct points.  Instances are immutable and safe to share.
    """

    __slots__ = ("points", "_index", "_below", "_full_mask", "_minimal_mask")

    def __init__(self, points: Sequence[str], relations: Iterable[tuple[str, str]] = ()):
        pts = tuple(points)
        if len(set(pts)) != len(pts):
            raise SiteError("duplicate point names")
        if not pts:
            raise SiteError("a site needs at least one point")
        self.points = pts
        self._index = {p: i for i, p in enumerate(pts)}
        n = len(pts)
        below = [1 << i for i in range(n)]  # below[i]: mask of points preceding-or-equal to point i
        for x, y in relations:
            if x not in self._index or y not in self._index:
                raise SiteError(f"relation mentions unknown point: {x!r} < {y!r}")
            below[self._index[y]] |= 1 << self._index[x]
        # transitive closure (n is small; fixed-point pass)
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = below[i]
                m = acc
                while m:
                    j = (m & -m).bit_length() - 1
                    m &= m - 1
                    acc |= below[j]
                if acc != below[i]:
                    below[i] = acc
                    changed = True
        for i in range(n):
            for j in range(n):
                if i != j and (below[i] >> j) & 1 and (below[j] >> i) & 1:
                    raise SiteError(f"cycle between points {pts[j]!r} and {pts[i]!r}")
        self._below = tuple(below)
        self._full_mask = (1 << n) - 1
        self._minimal_mask = 0
        for i in range(n):
            if below[i] == (1 << i):
                self._minimal_mask |= 1 << i

    def __repr__(self) -> str:
        return f"CausalSite(points={self.points!r})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CausalSite)
            and self.points == other.points
            and self._below == other._below
        )

    def __hash__(self) -> int:
        return hash((self.points, self._below))

    def index(self, point: str) -> int:
        return self._index[point]

    def precedes_eq(self, x: str, y: str) -> bool:
        """True iff x precedes y or x = y."""
        return bool((self._below[self._index[y]] >> self._index[x]) & 1)

    def strict_pairs(self) -> list[tuple[str, str]]:
        """All strictly ordered pairs (x, y), x != y, x before y."""
        out = []
        for i, p in enumerate(self.points):
            m = self._below[i] & ~(1 << i)
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                out.append((self.points[j], p))
        return out

    def covering_pairs(self) -> list[tuple[str, str]]:
        """Transitive reduction of the strict order, for compact serialization."""
        strict = {(x, y) for x, y in self.strict_pairs()}
        out = []
        for x, y in sorted(strict):
            if not any((x, z) in strict and (z, y) in strict for z in self.points):
                out.append((x, y))
        return out

    # --- region plumbing -------------------------------------------------

    def region(self, members: Iterable[str]) -> "Region":
        return Region(self, frozenset(members))

    def region_from_mask(self, mask: int) -> "Region":
        return Region(self, frozenset(self.points[i] for i in range(len(self.points)) if (mask >> i) & 1))

    def mask_of(self, members: Iterable[str]) -> int:
        mask = 0
        for p in members:
            mask |= 1 << self._index[p]
        return mask

    @property
    def full_mask(self) -> int:
        return self._full_mask

    @property
    def minimal_mask(self) -> int:
        """Mask of points with empty exclusive past."""
        return self._minimal_mask

    def past_mask(self, mask: int) -> int:
        acc = 0
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            acc |= self._below[i]
        return acc

    def all_region_masks(self) -> Iterator[int]:
        """Every subset of points, ascending mask order (deterministic)."""
        return iter(range(self._full_mask + 1))


@dataclass(frozen=True)
class Region:
    """A subset of a site's points."""

    site: CausalSite
    members: frozenset[str]

    def __post_init__(self) -> None:
        unknown = self.members - set(self.site.points)
        if unknown:
            raise SiteError(f"region members not on site: {sorted(unknown)}")

    @property
    def mask(self) -> int:
        return self.site.mask_of(self.members)

    def __le__(self, other: "Region") -> bool:
        _same_site(self, other)
        return self.members <= other.members

    def sorted_members(self) -> tuple[str, ...]:
        return tuple(sorted(self.members))

    def __repr__(self) -> str:
        return f"Region({sorted(self.members)})"


def _same_site(ra: Region, rb: Region) -> None:
    if ra.site is not rb.site and ra.site != rb.site:
        raise SiteError("regions live on different sites")


def past(region: Region) -> Region:
    """Causal past of a region: every point preceding-or-equal to a member."""
    return region.site.region_from_mask(region.site.past_mask(region.mask))


def exclusive_past(region: Region) -> Region:
    """past(region) with the region's own points removed."""
    site = region.site
    return site.region_from_mask(site.past_mask(region.mask) & ~region.mask)


def joint_past(ra: Region, rb: Region) -> Region:
    """(past(ra) union past(rb)) minus (ra union rb)."""
    _same_site(ra, rb)
    site = ra.site
    p = site.past_mask(ra.mask) | site.past_mask(rb.mask)
    return site.region_from_mask(p & ~(ra.mask | rb.mask))


def mutual_past(ra: Region, rb: Region) -> Region:
    """past(ra) intersected with past(rb)."""
    _same_site(ra, rb)
    site = ra.site
    return site.region_from_mask(site.past_mask(ra.mask) & site.past_mask(rb.mask))


def is_spacelike(ra: Region, rb: Region) -> bool:
    """True iff no point of one region is comparable to any point of the other.

    Undefined (raises) for empty regions.
    """
    _same_site(ra, rb)
    if not ra.members or not rb.members:
        raise SiteError("spacelike separation is undefined for empty regions")
    site = ra.site
    am, bm = ra.mask, rb.mask
    return site.past_mask(am) & bm == 0 and site.past_mask(bm) & am == 0
