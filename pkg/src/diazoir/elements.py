"""Element property table for the 12 supported elements.

The table (atomic number, Pauling electronegativity, covalent radius,
allowed valences) ships as an embedded JSON data file and is loaded once
at import. Only H, B, C, N, O, F, Si, P, S, Cl, Br and I are supported;
anything else is rejected at parse time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import UnknownElement


@dataclass(frozen=True)
class Element:
    symbol: str
    atomic_number: int
    electronegativity: float
    covalent_radius_pm: float
    valences: tuple[int, ...]


def _load_table() -> dict[str, Element]:
    raw = resources.files("diazoir.data").joinpath("elements.json").read_text("utf-8")
    table = {}
    for entry in json.loads(raw)["elements"]:
        elem = Element(
            symbol=entry["symbol"],
            atomic_number=entry["atomic_number"],
            electronegativity=entry["electronegativity"],
            covalent_radius_pm=float(entry["covalent_radius_pm"]),
            valences=tuple(entry["valences"]),
        )
        table[elem.symbol] = elem
    return table


ELEMENTS: dict[str, Element] = _load_table()

#: Symbols that may appear outside brackets (SMILES organic subset, within
#: our element set). Si must always be bracketed.
ORGANIC_SUBSET = frozenset({"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"})

#: Lowercase symbols accepted as aromatic atoms.
AROMATIC_SYMBOLS = frozenset({"c", "n", "o", "s"})


def get_element(symbol: str) -> Element:
    """Look up an element by case-sensitive symbol, e.g. ``"Cl"``."""
    try:
        return ELEMENTS[symbol]
    except KeyError:
        raise UnknownElement(f"element {symbol!r} is outside the supported set") from None


def allowed_valences(element: Element, charge: int) -> tuple[int, ...]:
    """Charge-adjusted valence options for an atom.

    Cationic N/P and O/S gain a bond, anionic ones lose one; boron is the
    mirror image; charged carbon is trivalent either way. Halogen and
    hydrogen ions end up with zero bonds.
    """
    if charge == 0:
        return element.valences
    sym = element.symbol
    if sym == "C":
        return (3,)
    if sym == "B":
        shift = -charge
    else:
        # N, P, O, S, halogens, H: a positive charge adds a bond,
        # a negative charge removes one.
        shift = charge
    vals = sorted({max(v + shift, 0) for v in element.valences})
    return tuple(vals)
