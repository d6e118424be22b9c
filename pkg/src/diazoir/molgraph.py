"""Molecular graph structures: atoms, bonds, rings and canonical ordering.

A :class:`Molecule` is an immutable attributed graph built by the SMILES
parser. Hydrogens are never graph nodes; they live in each atom's
``explicit_h_count``. Ring membership is perceived once at construction
(an edge is in a ring iff it is not a bridge) and drives both aromatic
bond assignment and the fingerprint in-ring invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .elements import Element


class BondOrder(Enum):
    SINGLE = "single"
    DOUBLE = "double"
    TRIPLE = "triple"
    AROMATIC = "aromatic"

    @property
    def valence(self) -> float:
        """Contribution to an atom's bond-order sum (aromatic counts 1.5)."""
        return _BOND_VALENCE[self]

    @property
    def code(self) -> int:
        """Small integer used in canonical invariants and fingerprints."""
        return _BOND_CODE[self]


_BOND_VALENCE = {
    BondOrder.SINGLE: 1.0,
    BondOrder.DOUBLE: 2.0,
    BondOrder.TRIPLE: 3.0,
    BondOrder.AROMATIC: 1.5,
}

_BOND_CODE = {
    BondOrder.SINGLE: 1,
    BondOrder.DOUBLE: 2,
    BondOrder.TRIPLE: 3,
    BondOrder.AROMATIC: 4,
}


@dataclass(frozen=True)
class Atom:
    element: Element
    formal_charge: int = 0
    explicit_h_count: int = 0
    aromatic: bool = False
    index: int = 0

    @property
    def symbol(self) -> str:
        return self.element.symbol


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: BondOrder

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.a, self.b)


@dataclass(frozen=True)
class Molecule:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...]
    source_smiles: str = ""
    # index -> list of (neighbor index, Bond); built in __post_init__
    _adjacency: tuple[tuple[tuple[int, Bond], ...], ...] = field(repr=False, default=())
    _ring_atoms: frozenset[int] = field(repr=False, default=frozenset())
    _ring_bonds: frozenset[int] = field(repr=False, default=frozenset())

    def __post_init__(self):
        adj: list[list[tuple[int, Bond]]] = [[] for _ in self.atoms]
        for bond in self.bonds:
            adj[bond.a].append((bond.b, bond))
            adj[bond.b].append((bond.a, bond))
        ring_atoms, ring_bonds = _perceive_rings(len(self.atoms), self.bonds)
        object.__setattr__(self, "_adjacency", tuple(tuple(n) for n in adj))
        object.__setattr__(self, "_ring_atoms", ring_atoms)
        object.__setattr__(self, "_ring_bonds", ring_bonds)

    def __len__(self) -> int:
        return len(self.atoms)

    def neighbors(self, idx: int) -> tuple[tuple[int, Bond], ...]:
        """(neighbor index, bond) pairs for the atom at ``idx``."""
        return self._adjacency[idx]

    def degree(self, idx: int) -> int:
        """Heavy-atom degree (implicit hydrogens excluded)."""
        return len(self._adjacency[idx])

    def bond_order_sum(self, idx: int) -> float:
        return sum(b.order.valence for _, b in self._adjacency[idx])

    def atom_in_ring(self, idx: int) -> bool:
        return idx in self._ring_atoms

    def bond_in_ring(self, bond_idx: int) -> bool:
        return bond_idx in self._ring_bonds

    def bond_between(self, a: int, b: int) -> Bond | None:
        for j, bond in self._adjacency[a]:
            if j == b:
                return bond
        return None


def _perceive_rings(n_atoms: int, bonds) -> tuple[frozenset[int], frozenset[int]]:
    """Ring atoms and ring bonds via bridge detection (iterative DFS).

    An edge lies on a cycle iff it is not a bridge; an atom is a ring atom
    iff some incident edge does.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n_atoms)]
    for bi, bond in enumerate(bonds):
        adj[bond.a].append((bond.b, bi))
        adj[bond.b].append((bond.a, bi))

    disc = [-1] * n_atoms
    low = [0] * n_atoms
    bridges: set[int] = set()
    timer = 0
    for start in range(n_atoms):
        if disc[start] != -1:
            continue
        # stack entries: (node, incoming bond index, iterator position)
        stack = [(start, -1, 0)]
        disc[start] = low[start] = timer
        timer += 1
        while stack:
            node, in_edge, ptr = stack[-1]
            if ptr < len(adj[node]):
                stack[-1] = (node, in_edge, ptr + 1)
                nxt, edge = adj[node][ptr]
                if edge == in_edge:
                    continue
                if disc[nxt] == -1:
                    disc[nxt] = low[nxt] = timer
                    timer += 1
                    stack.append((nxt, edge, 0))
                else:
                    low[node] = min(low[node], disc[nxt])
            else:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[node])
                    if low[node] > disc[parent]:
                        bridges.add(in_edge)

    ring_bonds = frozenset(i for i in range(len(bonds)) if i not in bridges)
    ring_atoms: set[int] = set()
    for bi in ring_bonds:
        ring_atoms.add(bonds[bi].a)
        ring_atoms.add(bonds[bi].b)
    return frozenset(ring_atoms), ring_bonds


def _initial_invariants(m: Molecule) -> list[tuple]:
    inv = []
    for atom in m.atoms:
        inv.append((
            atom.element.atomic_number,
            m.degree(atom.index),
            atom.formal_charge,
            atom.explicit_h_count,
            int(atom.aromatic),
            int(m.atom_in_ring(atom.index)),
        ))
    return inv


def _dense_ranks(keys: list) -> list[int]:
    order = {key: rank for rank, key in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(m: Molecule, ranks: list[int]) -> list[int]:
    """Propagate neighborhood information until the partition stabilizes."""
    n_classes = len(set(ranks))
    while True:
        keys = []
        for atom in m.atoms:
            shell = sorted(
                (bond.order.code, ranks[j]) for j, bond in m.neighbors(atom.index)
            )
            keys.append((ranks[atom.index], tuple(shell)))
        new_ranks = _dense_ranks(keys)
        new_classes = len(set(new_ranks))
        if new_classes == n_classes:
            return new_ranks
        ranks, n_classes = new_ranks, new_classes


def canonical_ranks(m: Molecule) -> list[int]:
    """One distinct rank per atom via refinement with tie breaking.

    Morgan-style: refine initial invariants to a fixpoint, then repeatedly
    single out one atom of the smallest tied class and re-refine, so each
    forced choice propagates through the graph before the next. Atoms left
    tied at any stage are neighborhood-equivalent, which for molecular
    graphs means symmetric, so the resulting canonical form does not
    depend on input numbering.
    """
    ranks = _refine(m, _dense_ranks(_initial_invariants(m)))
    n = len(m.atoms)
    while len(set(ranks)) < n:
        counts: dict[int, int] = {}
        for r in ranks:
            counts[r] = counts.get(r, 0) + 1
        target = min(r for r, c in counts.items() if c > 1)
        chosen = min(i for i in range(n) if ranks[i] == target)
        seeded = [(ranks[i], int(i != chosen)) for i in range(n)]
        ranks = _refine(m, _dense_ranks(seeded))
    return ranks


def canonical_atom_order(m: Molecule) -> list[int]:
    """Deterministic atom permutation, invariant under input renumbering.

    Sorted by :func:`canonical_ranks`; symmetric atoms may swap positions
    between renumberings, but the sequence of atom roles (and the
    canonically relabeled graph) is unchanged.
    """
    ranks = canonical_ranks(m)
    return sorted(range(len(m.atoms)), key=lambda i: ranks[i])


def isomorphic(a: Molecule, b: Molecule) -> bool:
    """Attribute-aware graph isomorphism check via canonical form.

    Compares atoms in canonical order along with their canonically
    relabeled bond multisets. Sufficient for roundtrip testing on the
    molecules this package handles.
    """
    if len(a) != len(b) or len(a.bonds) != len(b.bonds):
        return False

    def signature(m: Molecule):
        order = canonical_atom_order(m)
        pos = {atom_idx: k for k, atom_idx in enumerate(order)}
        atoms = tuple(
            (
                m.atoms[i].element.symbol,
                m.atoms[i].formal_charge,
                m.atoms[i].explicit_h_count,
                m.atoms[i].aromatic,
            )
            for i in order
        )
        bonds = tuple(sorted(
            (min(pos[b.a], pos[b.b]), max(pos[b.a], pos[b.b]), b.order.code)
            for b in m.bonds
        ))
        return atoms, bonds

    return signature(a) == signature(b)
