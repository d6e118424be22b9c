"""Hashed circular fingerprints and Tanimoto similarity.

Iterative neighborhood hashing in the Morgan/ECFP style: every atom
starts from a local invariant, each round folds in the sorted
(bond order, neighbor invariant) shell, and all invariants from rounds
0..radius set bits in a fixed-width vector. Hashing is 64-bit FNV-1a
over a canonical byte serialization, so fingerprints are bit-exact
across platforms and runs. No bit compatibility with any external
toolkit is promised.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LengthMismatch
from .molgraph import Molecule

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class Fingerprint:
    bits: int  # bit i set <=> (integer >> i) & 1
    nbits: int = 2048
    radius: int = 2

    def popcount(self) -> int:
        return self.bits.bit_count()

    def to_hex(self) -> str:
        """Fixed-width hex dump of the bit integer (low bit = bit 0)."""
        return format(self.bits, f"0{self.nbits // 4}x")

    @classmethod
    def from_hex(cls, text: str, nbits: int = 2048, radius: int = 2) -> "Fingerprint":
        return cls(bits=int(text, 16), nbits=nbits, radius=radius)


def atom_invariants(m: Molecule) -> list[int]:
    """Round-0 invariants: hashed (Z, degree, charge, H count, in-ring)."""
    out = []
    for atom in m.atoms:
        payload = (
            f"A{atom.element.atomic_number},{m.degree(atom.index)},"
            f"{atom.formal_charge},{atom.explicit_h_count},"
            f"{int(m.atom_in_ring(atom.index))}"
        )
        out.append(fnv1a64(payload.encode()))
    return out


def morgan_fingerprint(m: Molecule, radius: int = 2, nbits: int = 2048) -> Fingerprint:
    """Fold all round-0..radius neighborhood invariants into ``nbits`` bits."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if nbits <= 0 or nbits & (nbits - 1):
        raise ValueError("nbits must be a power of two")

    invariants = atom_invariants(m)
    collected = set(invariants)
    for _ in range(radius):
        nxt = []
        for atom in m.atoms:
            shell = sorted(
                (bond.order.code, invariants[j])
                for j, bond in m.neighbors(atom.index)
            )
            payload = f"I{invariants[atom.index]}" + "".join(
                f"|{code}:{inv}" for code, inv in shell)
            nxt.append(fnv1a64(payload.encode()))
        invariants = nxt
        collected.update(invariants)

    bits = 0
    for inv in collected:
        bits |= 1 << (inv % nbits)
    return Fingerprint(bits=bits, nbits=nbits, radius=radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; two empty fingerprints count as identical."""
    if a.nbits != b.nbits:
        raise LengthMismatch(
            f"fingerprint widths differ: {a.nbits} vs {b.nbits}")
    union = (a.bits | b.bits).bit_count()
    if union == 0:
        return 1.0
    return (a.bits & b.bits).bit_count() / union
