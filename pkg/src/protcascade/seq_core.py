"""Residue alphabet, property table, noise checking and FASTA parsing."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

from .errors import EmptyInput, FormatError, NoiseError, UnknownResidue


class HydropathyClass(enum.Enum):
    HYDROPHOBIC = "Hydrophobic"
    HYDROPHILIC = "Hydrophilic"
    NEUTRAL = "Neutral"


class ExchangeGroup(enum.Enum):
    E1 = "e1"
    E2 = "e2"
    E3 = "e3"
    E4 = "e4"
    E5 = "e5"
    E6 = "e6"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class AminoAcidProperties:
    letter: str
    name: str
    molecular_weight: float
    isoelectric_point: float
    hydropathy: HydropathyClass
    group: ExchangeGroup


_PHOB = HydropathyClass.HYDROPHOBIC
_PHIL = HydropathyClass.HYDROPHILIC
_NEUT = HydropathyClass.NEUTRAL

EXCHANGE_GROUP_MEMBERS = {
    ExchangeGroup.E1: "HRK",
    ExchangeGroup.E2: "DENQ",
    ExchangeGroup.E3: "C",
    ExchangeGroup.E4: "STPAG",
    ExchangeGroup.E5: "MILV",
    ExchangeGroup.E6: "FYW",
}
_GROUP_OF = {aa: g for g, members in EXCHANGE_GROUP_MEMBERS.items() for aa in members}

# (letter, name, molecular weight in Da, isoelectric point, hydropathy)
_TABLE = [
    ("A", "Alanine", 89.10, 6.00, _PHOB),
    ("R", "Arginine", 174.20, 10.76, _PHIL),
    ("N", "Asparagine", 132.12, 5.41, _PHIL),
    ("D", "Aspartic Acid", 133.11, 2.77, _PHIL),
    ("C", "Cysteine", 121.16, 5.07, _PHOB),
    ("E", "Glutamic Acid", 147.13, 3.22, _PHIL),
    ("Q", "Glutamine", 146.15, 5.65, _NEUT),
    ("G", "Glycine", 75.07, 5.97, _NEUT),
    ("H", "Histidine", 155.16, 7.59, _NEUT),
    ("I", "Isoleucine", 131.18, 6.02, _PHOB),
    ("L", "Leucine", 131.18, 5.98, _PHOB),
    ("K", "Lysine", 146.19, 9.74, _PHIL),
    ("M", "Methionine", 149.21, 5.74, _PHOB),
    ("F", "Phenylalanine", 165.19, 5.48, _PHOB),
    ("P", "Proline", 115.13, 6.30, _PHIL),
    ("S", "Serine", 105.09, 5.68, _NEUT),
    ("T", "Threonine", 119.12, 5.60, _NEUT),
    ("W", "Tryptophan", 204.23, 5.89, _PHOB),
    ("Y", "Tyrosine", 181.19, 5.66, _PHOB),
    ("V", "Valine", 117.15, 5.96, _PHOB),
]

AMINO_ACIDS: dict[str, AminoAcidProperties] = {
    letter: AminoAcidProperties(letter, name, mw, pi, hyd, _GROUP_OF[letter])
    for letter, name, mw, pi, hyd in _TABLE
}

#: The 20 one-letter codes in alphabetical order; defines 2-gram slot order.
ALPHABET = "".join(sorted(AMINO_ACIDS))
EXCHANGE_GROUPS = tuple(ExchangeGroup)
HYDROPATHY_CLASSES = tuple(HydropathyClass)

_STRIP = set(" \t\r\n\v\f0123456789")


@dataclass(frozen=True)
class ProteinSequence:
    """A noise-checked residue string. Build it through :func:`parse_sequence`."""

    residues: str

    def __post_init__(self):
        if not self.residues:
            raise EmptyInput("sequence has no residues")
        for pos, ch in enumerate(self.residues, start=1):
            if ch not in AMINO_ACIDS:
                raise NoiseError(pos, ch)

    @property
    def length(self) -> int:
        return len(self.residues)

    def __len__(self):
        return len(self.residues)

    def __iter__(self) -> Iterator[str]:
        return iter(self.residues)

    def __str__(self):
        return self.residues


def parse_sequence(text: str, record: str | None = None) -> ProteinSequence:
    """Uppercase ``text``, drop whitespace and digits, and validate every residue.

    Ambiguity codes (B, J, O, U, X, Z), gaps and stop symbols are rejected.
    ``NoiseError.position`` is 1-based within the cleaned residue string.
    """
    cleaned = "".join(ch for ch in text.upper() if ch not in _STRIP)
    if not cleaned:
        raise EmptyInput("no residues in input" if record is None else f"record {record!r} has no residues")
    for pos, ch in enumerate(cleaned, start=1):
        if ch not in AMINO_ACIDS:
            raise NoiseError(pos, ch, record)
    return ProteinSequence(cleaned)


def fasta_blocks(text: str) -> list[tuple[str, str]]:
    """Split FASTA text into raw ``(header, sequence_text)`` pairs without validation."""
    blocks: list[tuple[str, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith(">"):
            blocks.append((stripped[1:].strip(), []))
        elif not blocks:
            raise FormatError(f"line {lineno}: expected a '>' header before sequence data")
        else:
            blocks[-1][1].append(stripped)
    return [(header, "".join(lines)) for header, lines in blocks]


def parse_fasta(text: str) -> list[tuple[str, ProteinSequence]]:
    """Parse FASTA text into ``(identifier, sequence)`` pairs, preserving order.

    The identifier is the first whitespace-delimited token of the header.
    """
    records = []
    for header, body in fasta_blocks(text):
        ident = header.split()[0] if header.split() else ""
        records.append((ident, parse_sequence(body, record=ident)))
    return records


def residue_properties(letter: str) -> AminoAcidProperties:
    try:
        return AMINO_ACIDS[letter]
    except (KeyError, TypeError):
        raise UnknownResidue(letter) from None


def to_exchange_groups(seq: ProteinSequence) -> list[ExchangeGroup]:
    return [_GROUP_OF[aa] for aa in seq.residues]
