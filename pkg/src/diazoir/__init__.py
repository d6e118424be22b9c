"""diazoir: predict and explain the IR absorption wavenumber of diazo groups.

Pipeline: SMILES -> molecular graph -> diazo-group location -> structural
attention descriptor + Morgan fingerprint -> stacked/voted tree-ensemble
regression -> exact TreeSHAP explanations.
"""

from .molgraph import Atom, Bond, BondOrder, Molecule, canonical_atom_order
from .smiles import parse_smiles, write_smiles

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Bond",
    "BondOrder",
    "Molecule",
    "canonical_atom_order",
    "parse_smiles",
    "write_smiles",
    "__version__",
]
