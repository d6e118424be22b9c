"""Structural attention descriptor over the diazo substituent domains.

For each domain (R1, R2) the descriptor records the electronegativity
and covalent radius of the atom bonded to the diazo carbon, then counts
(element, bond type) pairs over that atom's own neighbor shell - the
diazo carbon itself excluded, implicit hydrogens counted as single-bonded
H. Domains occupied by an implicit hydrogen use hydrogen's constants and
have an empty shell.

Feature names render as ``ELEMENT_BONDTYPE_DOMAIN`` (``O_DOUBLE_R2``),
with ``electronegativity_<D>`` and ``covalent_radius_<D>`` leading each
domain block. Column order is fixed by the combo table so dataset dumps
are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diazo import IMPLICIT_H, DiazoContext
from .elements import ELEMENTS, get_element
from .errors import DiazoirError, DomainMissing
from .molgraph import BondOrder, Molecule

_ELEMENT_ORDER = ["H", "B", "C", "N", "O", "F", "Si", "P", "S", "Cl", "Br", "I"]
_MULTI_BOND_ELEMENTS = ["C", "N", "O", "S"]

DOMAINS = ("R1", "R2")


@dataclass(frozen=True)
class ComboTable:
    """Ordered (element, bond type) pairs tallied per domain."""
    entries: tuple[tuple[str, BondOrder], ...]
    version: str

    def __post_init__(self):
        seen = set()
        for symbol, order in self.entries:
            if symbol not in ELEMENTS:
                raise DiazoirError(f"combo table: unknown element {symbol!r}")
            if symbol == "H" and order is not BondOrder.SINGLE:
                raise DiazoirError("combo table: hydrogen only bonds singly")
            key = (symbol, order)
            if key in seen:
                raise DiazoirError(f"combo table: duplicate entry {symbol} {order.name}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.entries)

    def feature_names(self) -> list[str]:
        """Full SAMD column list: R1 block then R2 block."""
        names = []
        for domain in DOMAINS:
            names.append(f"electronegativity_{domain}")
            names.append(f"covalent_radius_{domain}")
            for symbol, order in self.entries:
                names.append(f"{symbol}_{order.name}_{domain}")
        return names


def default_combo_table() -> ComboTable:
    """The shipped 18-combo table.

    Single bonds to all 12 elements, double bonds to C/N/O/S, triple
    bonds to C/N; pairs that cannot occur under valence rules (H with a
    multiple bond, halogen double bonds, ...) are omitted.
    """
    entries = [(sym, BondOrder.SINGLE) for sym in _ELEMENT_ORDER]
    entries += [(sym, BondOrder.DOUBLE) for sym in _MULTI_BOND_ELEMENTS]
    entries += [(sym, BondOrder.TRIPLE) for sym in ("C", "N")]
    return ComboTable(entries=tuple(entries), version="default")


def extended_combo_table() -> ComboTable:
    """Default table plus aromatic bonds to C/N/O/S (22 combos)."""
    base = default_combo_table()
    entries = base.entries + tuple(
        (sym, BondOrder.AROMATIC) for sym in _MULTI_BOND_ELEMENTS)
    return ComboTable(entries=entries, version="extended")


def load_combo_table(path: str | Path) -> ComboTable:
    """Read a custom table: one ``ELEMENT BONDTYPE`` pair per line.

    Blank lines and ``#`` comments are skipped. Entry order becomes
    column order.
    """
    entries = []
    for lineno, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise DiazoirError(
                f"{path}:{lineno}: expected 'ELEMENT BONDTYPE', got {line!r}")
        symbol, order_name = parts
        get_element(symbol)
        try:
            order = BondOrder[order_name.upper()]
        except KeyError:
            raise DiazoirError(
                f"{path}:{lineno}: unknown bond type {order_name!r}") from None
        entries.append((symbol, order))
    if not entries:
        raise DiazoirError(f"{path}: combo table is empty")
    return ComboTable(entries=tuple(entries), version=f"custom:{Path(path).name}")


def combo_table_by_name(name: str) -> ComboTable:
    """Resolve a config value: ``default``, ``extended``, or a file path."""
    if name == "default":
        return default_combo_table()
    if name == "extended":
        return extended_combo_table()
    return load_combo_table(name)


@dataclass(frozen=True)
class SamdVector:
    names: tuple[str, ...]
    values: np.ndarray

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))

    def __getitem__(self, name: str) -> float:
        try:
            return float(self.values[self.names.index(name)])
        except ValueError:
            raise KeyError(name) from None


def featurize_samd(ctx: DiazoContext, m: Molecule, table: ComboTable) -> SamdVector:
    """Compute the descriptor for one diazo context.

    Raises :class:`DomainMissing` when a context references an atom the
    molecule does not have.
    """
    names = tuple(table.feature_names())
    blocks = []
    for root in (ctx.r1_root, ctx.r2_root):
        blocks.append(_domain_block(root, ctx.diazo_carbon, m, table))
    return SamdVector(names=names, values=np.concatenate(blocks))


def _domain_block(root: int | None, diazo_carbon: int, m: Molecule,
                  table: ComboTable) -> np.ndarray:
    index = {key: k for k, key in enumerate(table.entries)}
    counts = np.zeros(len(table), dtype=np.float64)

    if root is IMPLICIT_H:
        element = ELEMENTS["H"]
    else:
        if not (0 <= root < len(m.atoms)):
            raise DomainMissing(f"domain root {root} outside molecule")
        if m.bond_between(root, diazo_carbon) is None:
            raise DomainMissing(
                f"domain root {root} is not bonded to diazo carbon {diazo_carbon}")
        atom = m.atoms[root]
        element = atom.element
        for j, bond in m.neighbors(root):
            if j == diazo_carbon:
                continue
            key = (m.atoms[j].symbol, bond.order)
            if key in index:
                counts[index[key]] += 1.0
        h_key = ("H", BondOrder.SINGLE)
        if h_key in index:
            counts[index[h_key]] += atom.explicit_h_count

    head = np.array([element.electronegativity, element.covalent_radius_pm])
    return np.concatenate([head, counts])
