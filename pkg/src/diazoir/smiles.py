"""SMILES parsing and writing for the documented grammar subset.

Supported: organic-subset atoms (B, C, N, O, P, S, F, Cl, Br, I), bracket
atoms over the full 12-element set with charge and explicit H counts,
branches, ring closures (digits and %nn), bond symbols ``- = # :``,
aromatic lowercase ``c n o s``, and ``.``-separated components. Isotopes,
atom classes, and stereo markers (``/ \\ @ @@``) are accepted and
discarded. See docs/smiles-subset.md for the grammar.

Hydrogens are materialized as per-atom counts: implicit hydrogens are
derived from charge-adjusted valence rules, and explicit ``[H]`` atoms
are folded into their heavy neighbor.
"""

from __future__ import annotations

import re

from .elements import (
    AROMATIC_SYMBOLS,
    ORGANIC_SUBSET,
    Element,
    allowed_valences,
    get_element,
)
from .errors import (
    SmilesParseError,
    UnbalancedBracket,
    UnknownElement,
    UnmatchedRingClosure,
    ValenceViolation,
)
from .molgraph import Atom, Bond, BondOrder, Molecule

_BRACKET_RE = re.compile(
    r"^(?P<isotope>\d+)?"
    r"(?P<symbol>[A-Z][a-z]?|[a-z])"
    r"(?P<chiral>@@|@)?"
    r"(?P<hcount>H\d*)?"
    r"(?P<charge>\+\+|--|[+-]\d{1,2}|[+-])?"
    r"(?::(?P<cls>\d+))?$"
)

_BOND_SYMBOLS = {
    "-": BondOrder.SINGLE,
    "=": BondOrder.DOUBLE,
    "#": BondOrder.TRIPLE,
    ":": BondOrder.AROMATIC,
    # stereo bond markers, accepted as plain single bonds
    "/": BondOrder.SINGLE,
    "\\": BondOrder.SINGLE,
}

_TWO_LETTER = ("Cl", "Br")


class _RawAtom:
    """Mutable atom record used during parsing."""

    __slots__ = ("element", "charge", "hcount", "aromatic", "bracket")

    def __init__(self, element: Element, charge=0, hcount=None, aromatic=False,
                 bracket=False):
        self.element = element
        self.charge = charge
        self.hcount = hcount  # None = derive implicit count
        self.aromatic = aromatic
        self.bracket = bracket


def _parse_charge(text: str) -> int:
    if text == "++":
        return 2
    if text == "--":
        return -2
    if text in ("+", "-"):
        return 1 if text == "+" else -1
    return int(text[1:]) * (1 if text[0] == "+" else -1)


def _parse_bracket(body: str, pos: int) -> _RawAtom:
    match = _BRACKET_RE.match(body)
    if match is None:
        raise SmilesParseError(f"malformed bracket atom [{body}] at position {pos}")
    symbol = match.group("symbol")
    aromatic = symbol.islower()
    if aromatic:
        if symbol not in AROMATIC_SYMBOLS:
            raise UnknownElement(
                f"aromatic symbol {symbol!r} not supported (only c, n, o, s)")
        symbol = symbol.capitalize()
    element = get_element(symbol)
    hcount_text = match.group("hcount")
    if hcount_text is None:
        hcount = 0
    elif hcount_text == "H":
        hcount = 1
    else:
        hcount = int(hcount_text[1:])
    if element.symbol == "H" and hcount:
        raise SmilesParseError(f"hydrogen atom with H count at position {pos}")
    charge_text = match.group("charge")
    charge = _parse_charge(charge_text) if charge_text else 0
    return _RawAtom(element, charge=charge, hcount=hcount, aromatic=aromatic,
                    bracket=True)


def parse_smiles(smiles: str) -> Molecule:
    """Parse a SMILES string into a validated :class:`Molecule`.

    Raises :class:`UnbalancedBracket`, :class:`UnmatchedRingClosure`,
    :class:`UnknownElement` or :class:`ValenceViolation` on rejection;
    all are subclasses of :class:`SmilesParseError`.
    """
    if not smiles or not smiles.strip():
        raise SmilesParseError("empty SMILES input")
    if not smiles.isascii():
        raise SmilesParseError("SMILES must be ASCII text")
    smiles = smiles.strip()

    atoms: list[_RawAtom] = []
    # (a, b, order-or-None); None = default bond, resolved after ring perception
    raw_bonds: list[tuple[int, int, BondOrder | None]] = []
    bond_seen: set[tuple[int, int]] = set()

    prev: int | None = None
    pending: BondOrder | None = None
    pending_explicit = False
    branch_stack: list[int | None] = []
    # ring number -> (atom index, bond order at open, explicit flag)
    ring_open: dict[int, tuple[int, BondOrder | None, bool]] = {}

    def add_bond(a: int, b: int, order: BondOrder | None, pos: int):
        if a == b:
            raise SmilesParseError(f"self-bond at position {pos}")
        key = (min(a, b), max(a, b))
        if key in bond_seen:
            raise SmilesParseError(f"duplicate bond at position {pos}")
        bond_seen.add(key)
        raw_bonds.append((a, b, order))

    def attach(idx: int, pos: int):
        nonlocal prev, pending, pending_explicit
        if prev is not None:
            add_bond(prev, idx, pending, pos)
        elif pending_explicit:
            raise SmilesParseError(f"bond symbol with no preceding atom at position {pos}")
        prev = idx
        pending = None
        pending_explicit = False

    i = 0
    n = len(smiles)
    while i < n:
        ch = smiles[i]

        if ch == "[":
            end = smiles.find("]", i)
            if end == -1:
                raise UnbalancedBracket(f"unclosed '[' at position {i}")
            atoms.append(_parse_bracket(smiles[i + 1:end], i))
            attach(len(atoms) - 1, i)
            i = end + 1
        elif ch == "]":
            raise UnbalancedBracket(f"stray ']' at position {i}")
        elif ch == "(":
            if prev is None:
                raise SmilesParseError(f"branch with no preceding atom at position {i}")
            branch_stack.append(prev)
            i += 1
        elif ch == ")":
            if not branch_stack:
                raise UnbalancedBracket(f"stray ')' at position {i}")
            if pending_explicit:
                raise SmilesParseError(f"dangling bond before ')' at position {i}")
            prev = branch_stack.pop()
            i += 1
        elif ch in _BOND_SYMBOLS:
            if pending_explicit:
                raise SmilesParseError(f"consecutive bond symbols at position {i}")
            pending = _BOND_SYMBOLS[ch]
            pending_explicit = True
            i += 1
        elif ch.isdigit() or ch == "%":
            if ch == "%":
                if i + 2 >= n or not smiles[i + 1:i + 3].isdigit():
                    raise SmilesParseError(f"malformed %nn ring closure at position {i}")
                number = int(smiles[i + 1:i + 3])
                i += 3
            else:
                number = int(ch)
                i += 1
            if prev is None:
                raise SmilesParseError(f"ring closure with no atom at position {i}")
            if number in ring_open:
                open_idx, open_order, open_explicit = ring_open.pop(number)
                order = None
                if open_explicit and pending_explicit:
                    if open_order != pending:
                        raise SmilesParseError(
                            f"conflicting ring-closure bond orders for ring {number}")
                    order = pending
                elif open_explicit:
                    order = open_order
                elif pending_explicit:
                    order = pending
                add_bond(open_idx, prev, order, i)
            else:
                ring_open[number] = (prev, pending, pending_explicit)
            pending = None
            pending_explicit = False
        elif ch == ".":
            if pending_explicit:
                raise SmilesParseError(f"bond symbol before '.' at position {i}")
            prev = None
            i += 1
        elif ch.isalpha():
            symbol = None
            for two in _TWO_LETTER:
                if smiles.startswith(two, i):
                    symbol = two
                    break
            if symbol is None:
                symbol = ch
            aromatic = symbol.islower()
            if aromatic:
                if symbol not in AROMATIC_SYMBOLS:
                    raise UnknownElement(
                        f"aromatic symbol {symbol!r} not supported at position {i}")
                lookup = symbol.capitalize()
            else:
                lookup = symbol
            element = get_element(lookup)  # raises UnknownElement
            if lookup == "H":
                raise UnknownElement(
                    f"H must be written as a bracket atom at position {i}")
            atoms.append(_RawAtom(element, aromatic=aromatic))
            attach(len(atoms) - 1, i)
            i += len(symbol)
        else:
            raise SmilesParseError(f"unexpected character {ch!r} at position {i}")

    if branch_stack:
        raise UnbalancedBracket("unclosed '(' in SMILES")
    if pending_explicit:
        raise SmilesParseError("dangling bond symbol at end of SMILES")
    if ring_open:
        digits = ", ".join(str(d) for d in sorted(ring_open))
        raise UnmatchedRingClosure(f"unmatched ring closure digit(s): {digits}")
    if not atoms:
        raise SmilesParseError("no atoms in SMILES input")

    return _build_molecule(smiles, atoms, raw_bonds)


def _build_molecule(source: str, raw_atoms: list[_RawAtom],
                    raw_bonds: list[tuple[int, int, BondOrder | None]]) -> Molecule:
    # Resolve default bonds: aromatic when both ends are aromatic atoms
    # sharing a ring, single otherwise. Ring perception runs on the raw
    # graph (bond orders do not affect which edges lie on cycles).
    probe = Molecule(
        atoms=tuple(
            Atom(element=a.element, index=k) for k, a in enumerate(raw_atoms)),
        bonds=tuple(Bond(a, b, BondOrder.SINGLE) for a, b, _ in raw_bonds),
        source_smiles=source,
    )
    for k, raw in enumerate(raw_atoms):
        if raw.aromatic and not probe.atom_in_ring(k):
            raise ValenceViolation(
                f"aromatic atom {raw.element.symbol.lower()!r} (index {k}) "
                "is not in a ring")

    bonds: list[Bond] = []
    for bi, (a, b, order) in enumerate(raw_bonds):
        if order is None:
            both_aromatic = raw_atoms[a].aromatic and raw_atoms[b].aromatic
            if both_aromatic and probe.bond_in_ring(bi):
                order = BondOrder.AROMATIC
            else:
                order = BondOrder.SINGLE
        elif order is BondOrder.AROMATIC:
            if not (raw_atoms[a].aromatic and raw_atoms[b].aromatic):
                raise ValenceViolation(
                    f"aromatic bond between non-aromatic atoms {a} and {b}")
            if not probe.bond_in_ring(bi):
                raise ValenceViolation(
                    f"aromatic bond between atoms {a} and {b} is not in a ring")
        bonds.append(Bond(a, b, order))

    # Fold explicit [H] atoms into their heavy neighbor's H count.
    h_indices = [k for k, a in enumerate(raw_atoms) if a.element.symbol == "H"]
    extra_h: dict[int, int] = {}
    if h_indices:
        h_set = set(h_indices)
        for k in h_indices:
            incident = [bond for bond in bonds if k in bond.endpoints]
            if (len(incident) != 1 or incident[0].order is not BondOrder.SINGLE
                    or raw_atoms[k].charge != 0
                    or incident[0].other(k) in h_set):
                raise ValenceViolation(
                    f"explicit hydrogen at index {k} must have exactly one "
                    "single bond to a heavy atom")
            heavy = incident[0].other(k)
            extra_h[heavy] = extra_h.get(heavy, 0) + 1
        remap = {}
        kept = 0
        for k in range(len(raw_atoms)):
            if k not in h_set:
                remap[k] = kept
                kept += 1
        raw_atoms = [a for k, a in enumerate(raw_atoms) if k not in h_set]
        extra_h = {remap[k]: v for k, v in extra_h.items()}
        bonds = [Bond(remap[b.a], remap[b.b], b.order)
                 for b in bonds if b.a not in h_set and b.b not in h_set]

    # Assemble with hydrogen counts and validate valences.
    shell = Molecule(
        atoms=tuple(
            Atom(element=a.element, formal_charge=a.charge, aromatic=a.aromatic,
                 index=k)
            for k, a in enumerate(raw_atoms)),
        bonds=tuple(bonds),
        source_smiles=source,
    )
    final_atoms = []
    for k, raw in enumerate(raw_atoms):
        h = _resolve_h_count(raw, shell, k, extra_h.get(k, 0))
        final_atoms.append(
            Atom(element=raw.element, formal_charge=raw.charge,
                 explicit_h_count=h, aromatic=raw.aromatic, index=k))
    return Molecule(atoms=tuple(final_atoms), bonds=tuple(bonds),
                    source_smiles=source)


def _resolve_h_count(raw: _RawAtom, shell: Molecule, idx: int, folded_h: int) -> int:
    """Implicit-H count for one atom, with valence validation."""
    bond_sum = shell.bond_order_sum(idx)
    options = allowed_valences(raw.element, raw.charge)
    symbol = raw.element.symbol

    if raw.bracket:
        h = raw.hcount + folded_h
        total = bond_sum + h
        # Aromatic ring bonds contribute half-integers; allow the rounding
        # slack instead of kekulizing.
        slack = 0.5 if raw.aromatic else 0.0
        if options and total > max(options) + slack:
            raise ValenceViolation(
                f"atom {symbol}{'+' if raw.charge > 0 else ''}"
                f"{raw.charge if raw.charge else ''} at index {idx} has "
                f"valence {total:g}, allowed up to {max(options)}")
        return h

    if raw.aromatic:
        # Kekule-free rule: aromatic carbon with two ring neighbors carries
        # one hydrogen unless substituted; aromatic n/o/s carry none. A
        # folded explicit [H] counts as the substituent.
        if symbol == "C" and shell.degree(idx) == 2 and folded_h == 0:
            return 1
        return folded_h

    bond_sum = int(bond_sum)
    fitting = [v for v in options if v >= bond_sum + folded_h]
    if not fitting:
        raise ValenceViolation(
            f"atom {symbol} at index {idx} has bond-order sum "
            f"{bond_sum + folded_h}, allowed valences {list(options)}")
    return fitting[0] - bond_sum


# --- internal debugging serializer ---

def write_smiles(m: Molecule) -> str:
    """Serialize a Molecule back to SMILES (canonical-order DFS).

    Debugging aid: output is valid input for :func:`parse_smiles` and
    roundtrips to an isomorphic graph; no cross-toolkit canonicality is
    implied.
    """
    from .molgraph import canonical_ranks

    ranks = canonical_ranks(m)
    visited: set[int] = set()
    ring_digit_of: dict[tuple[int, int], int] = {}
    next_digit = [1]

    # Pre-assign ring-closure digits: DFS back edges.
    def assign_digit() -> int:
        d = next_digit[0]
        next_digit[0] += 1
        if d > 99:
            raise SmilesParseError("more than 99 ring closures")
        return d

    def bond_symbol(bond: Bond, a: int, b: int) -> str:
        both_aromatic = m.atoms[a].aromatic and m.atoms[b].aromatic
        if bond.order is BondOrder.SINGLE:
            return "-" if both_aromatic else ""
        if bond.order is BondOrder.AROMATIC:
            return "" if both_aromatic else ":"
        return "=" if bond.order is BondOrder.DOUBLE else "#"

    def atom_token(idx: int) -> str:
        atom = m.atoms[idx]
        symbol = atom.element.symbol
        written = symbol.lower() if atom.aromatic else symbol
        needs_bracket = (
            atom.formal_charge != 0
            or symbol not in ORGANIC_SUBSET
            or atom.explicit_h_count != _default_h(idx)
        )
        if not needs_bracket:
            return written
        h = atom.explicit_h_count
        h_part = "" if h == 0 else ("H" if h == 1 else f"H{h}")
        c = atom.formal_charge
        if c == 0:
            c_part = ""
        elif c in (1, -1):
            c_part = "+" if c == 1 else "-"
        else:
            c_part = f"{'+' if c > 0 else '-'}{abs(c)}"
        return f"[{written}{h_part}{c_part}]"

    def _default_h(idx: int) -> int:
        atom = m.atoms[idx]
        if atom.element.symbol not in ORGANIC_SUBSET:
            return -1  # always bracket
        if atom.aromatic:
            if atom.element.symbol == "C" and m.degree(idx) == 2:
                return 1
            return 0
        bond_sum = m.bond_order_sum(idx)
        if bond_sum != int(bond_sum):
            return -1
        options = allowed_valences(atom.element, atom.formal_charge)
        fitting = [v for v in options if v >= int(bond_sum)]
        return (fitting[0] - int(bond_sum)) if fitting else -1

    def emit(start: int) -> str:
        # First pass: classify tree vs back edges in canonical-rank DFS order.
        parent: dict[int, int] = {start: -1}
        order_children: dict[int, list[tuple[int, Bond]]] = {}
        back_edges: list[tuple[int, int, Bond]] = []
        back_seen: set[tuple[int, int]] = set()
        dfs = [start]
        seen = {start}
        while dfs:
            node = dfs.pop()
            children = []
            for j, bond in sorted(m.neighbors(node),
                                  key=lambda nb: (ranks[nb[0]], nb[0])):
                if j == parent.get(node):
                    continue
                if j in seen:
                    key = (min(node, j), max(node, j))
                    if key not in back_seen:
                        back_seen.add(key)
                        back_edges.append((node, j, bond))
                    continue
                seen.add(j)
                parent[j] = node
                children.append((j, bond))
            order_children[node] = children
            for j, _ in reversed(children):
                dfs.append(j)

        digits_at: dict[int, list[tuple[int, str]]] = {}
        for a, b, bond in back_edges:
            d = assign_digit()
            sym = bond_symbol(bond, a, b)
            digits_at.setdefault(a, []).append((d, sym))
            digits_at.setdefault(b, []).append((d, ""))

        def digit_text(d: int) -> str:
            return str(d) if d < 10 else f"%{d:02d}"

        def render(node: int) -> str:
            parts = [atom_token(node)]
            for d, sym in digits_at.get(node, []):
                parts.append(sym + digit_text(d))
            children = order_children[node]
            for k, (child, bond) in enumerate(children):
                body = bond_symbol(bond, node, child) + render(child)
                if k < len(children) - 1:
                    parts.append(f"({body})")
                else:
                    parts.append(body)
            return "".join(parts)

        return render(start)

    components: list[str] = []
    for idx in canonical_start_order(m):
        if idx in visited:
            continue
        comp = _component_atoms(m, idx)
        visited.update(comp)
        components.append(emit(idx))
    return ".".join(components)


def canonical_start_order(m: Molecule) -> list[int]:
    from .molgraph import canonical_atom_order

    return canonical_atom_order(m)


def _component_atoms(m: Molecule, start: int) -> set[int]:
    seen = {start}
    queue = [start]
    while queue:
        node = queue.pop()
        for j, _ in m.neighbors(node):
            if j not in seen:
                seen.add(j)
                queue.append(j)
    return seen
