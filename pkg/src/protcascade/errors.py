"""Exception hierarchy shared by every stage of the pipeline."""


class CascadeError(Exception):
    """Base class for all anticipated failures."""


class NoiseError(CascadeError, ValueError):
    """A residue outside the 20-letter alphabet was found."""

    def __init__(self, position, char, record=None):
        self.position = position
        self.char = char
        self.record = record
        where = f"record {record!r}, " if record is not None else ""
        super().__init__(f"noise in {where}position {position}: {char!r} is not a standard residue")


class EmptyInput(CascadeError, ValueError):
    pass


class FormatError(CascadeError, ValueError):
    pass


class UnknownResidue(CascadeError, KeyError):
    def __str__(self):
        return f"unknown residue {self.args[0]!r}"


class SequenceTooShort(CascadeError, ValueError):
    pass


class StorageError(CascadeError, OSError):
    pass


class EmptyWarehouse(CascadeError, ValueError):
    pass


class InsufficientData(CascadeError, ValueError):
    pass


class InsufficientCandidates(CascadeError, ValueError):
    pass


class DegenerateRange(CascadeError, ValueError):
    pass
