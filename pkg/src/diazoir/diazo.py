"""Locate diazo groups and split their substituents into R1/R2 domains.

The diazo motif is a carbon double-bonded to a terminal N=N unit,
written ``C=[N+]=[N-]`` (or the uncharged resonance form ``C=N#N``,
which is normalized to the charged form first). The diazo carbon's two
remaining positions are the substituent domains: R1 is the "heavier"
side by atomic number, with documented tie-breaking; positions occupied
by implicit hydrogens are H-marker domains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainMissing
from .molgraph import Atom, Bond, BondOrder, Molecule, canonical_ranks

#: Sentinel for a substituent position occupied by an implicit hydrogen.
IMPLICIT_H = None


@dataclass(frozen=True)
class DiazoContext:
    """One located diazo group with assigned substituent domains.

    ``r1_root`` / ``r2_root`` are atom indices, or ``None`` for an
    implicit-hydrogen position.
    """
    diazo_carbon: int
    diazo_nitrogens: tuple[int, int]  # (inner N+, terminal N-)
    r1_root: int | None
    r2_root: int | None


def normalize_diazo(m: Molecule) -> Molecule:
    """Rewrite uncharged ``C=N#N`` diazo motifs to ``C=[N+]=[N-]``.

    Both notations occur in literature-derived SMILES; downstream
    matching and fingerprinting work on the charged form. Returns the
    input molecule unchanged when nothing matches.
    """
    targets = []
    for atom in m.atoms:
        if atom.symbol != "N" or atom.formal_charge != 0:
            continue
        if m.degree(atom.index) != 2 or atom.explicit_h_count != 0:
            continue
        neighbors = m.neighbors(atom.index)
        triple = [
            (j, b) for j, b in neighbors
            if b.order is BondOrder.TRIPLE and m.atoms[j].symbol == "N"
            and m.degree(j) == 1 and m.atoms[j].formal_charge == 0
            and m.atoms[j].explicit_h_count == 0
        ]
        double = [
            (j, b) for j, b in neighbors
            if b.order is BondOrder.DOUBLE and m.atoms[j].symbol == "C"
        ]
        if triple and double:
            targets.append((atom.index, triple[0][0]))
    if not targets:
        return m

    charge_fix = {}
    retype = {}
    for mid, terminal in targets:
        charge_fix[mid] = 1
        charge_fix[terminal] = -1
        retype[(min(mid, terminal), max(mid, terminal))] = BondOrder.DOUBLE

    atoms = tuple(
        Atom(element=a.element,
             formal_charge=charge_fix.get(a.index, a.formal_charge),
             explicit_h_count=a.explicit_h_count,
             aromatic=a.aromatic, index=a.index)
        for a in m.atoms
    )
    bonds = tuple(
        Bond(b.a, b.b, retype.get((min(b.a, b.b), max(b.a, b.b)), b.order))
        for b in m.bonds
    )
    return Molecule(atoms=atoms, bonds=bonds, source_smiles=m.source_smiles)


def find_diazo(m: Molecule) -> list[DiazoContext]:
    """Every diazo group in the molecule, with R1/R2 already assigned.

    Matches ``C=[N+]=[N-]`` with a terminal anionic nitrogen; the
    uncharged ``C=N#N`` form is normalized first. Returns an empty list
    when the motif is absent. Contexts are ordered by the canonical rank
    of their diazo carbon, so the listing is renumbering-invariant.
    """
    m = normalize_diazo(m)
    contexts = []
    for atom in m.atoms:
        if atom.symbol != "N" or atom.formal_charge != 1:
            continue
        if m.degree(atom.index) != 2:
            continue
        neighbors = m.neighbors(atom.index)
        terminal = [
            j for j, b in neighbors
            if b.order is BondOrder.DOUBLE and m.atoms[j].symbol == "N"
            and m.atoms[j].formal_charge == -1 and m.degree(j) == 1
        ]
        carbon = [
            j for j, b in neighbors
            if b.order is BondOrder.DOUBLE and m.atoms[j].symbol == "C"
        ]
        if not terminal or not carbon:
            continue
        ctx = _build_context(m, carbon[0], atom.index, terminal[0])
        contexts.append(ctx)

    ranks = canonical_ranks(m) if contexts else []
    contexts.sort(key=lambda c: ranks[c.diazo_carbon])
    return contexts


def _build_context(m: Molecule, carbon: int, n_inner: int, n_terminal: int) -> DiazoContext:
    roots = [j for j, _ in m.neighbors(carbon) if j != n_inner]
    # pad substituent positions with H markers up to two
    padded: list[int | None] = list(roots[:2]) + [IMPLICIT_H] * (2 - len(roots[:2]))
    ctx = DiazoContext(diazo_carbon=carbon, diazo_nitrogens=(n_inner, n_terminal),
                       r1_root=padded[0], r2_root=padded[1])
    r1, r2 = assign_domains(ctx, m)
    return DiazoContext(diazo_carbon=carbon, diazo_nitrogens=(n_inner, n_terminal),
                        r1_root=r1, r2_root=r2)


def domain_rank_key(m: Molecule, root: int | None, diazo_carbon: int,
                    ranks: list[int] | None = None):
    """Sort key ranking substituent roots; larger key = R1.

    Ordering: heavy atom beats H marker; then root atomic number; then
    the summed atomic numbers of the root's neighbor shell (diazo carbon
    excluded, implicit hydrogens included); then the summed bond orders
    of that shell; final tie by canonical atom order.
    """
    if root is IMPLICIT_H:
        return (0, 0, 0, 0.0, 0)
    atom = m.atoms[root]
    shell_z = atom.explicit_h_count  # implicit hydrogens: Z=1 each
    shell_bond = float(atom.explicit_h_count)
    for j, bond in m.neighbors(root):
        if j == diazo_carbon:
            continue
        shell_z += m.atoms[j].element.atomic_number
        shell_bond += bond.order.valence
    if ranks is None:
        ranks = canonical_ranks(m)
    # canonical order position: earlier (smaller rank) wins the last tie,
    # so negate for the descending comparison
    return (1, atom.element.atomic_number, shell_z, shell_bond, -ranks[root])


def assign_domains(ctx: DiazoContext, m: Molecule) -> tuple[int | None, int | None]:
    """Order a context's substituent roots as (R1, R2)."""
    roots = [ctx.r1_root, ctx.r2_root]
    if all(r is IMPLICIT_H for r in roots):
        return (IMPLICIT_H, IMPLICIT_H)
    ranks = canonical_ranks(m)
    keyed = sorted(
        roots,
        key=lambda r: domain_rank_key(m, r, ctx.diazo_carbon, ranks),
        reverse=True,
    )
    return (keyed[0], keyed[1])


def select_context(m: Molecule, contexts: list[DiazoContext]) -> DiazoContext:
    """Pipeline default for molecules with several diazo groups.

    Picks the context whose R1 root ranks highest under the domain
    ordering; dataset rows carry a single wavenumber, so one context must
    represent the molecule.
    """
    if not contexts:
        raise DomainMissing("molecule has no diazo context")
    if len(contexts) == 1:
        return contexts[0]
    ranks = canonical_ranks(m)
    return max(
        contexts,
        key=lambda c: (domain_rank_key(m, c.r1_root, c.diazo_carbon, ranks),
                       -ranks[c.diazo_carbon]),
    )
