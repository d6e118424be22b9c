"""Exception hierarchy for the diazoir package.

Every rejection of user input carries a typed error from this module so
callers (and the CLI) can distinguish domain errors from I/O failures.
"""


class DiazoirError(Exception):
    """Base class for all domain errors raised by diazoir."""


# --- SMILES parsing ---

class SmilesParseError(DiazoirError):
    """Malformed SMILES input."""


class UnbalancedBracket(SmilesParseError):
    """Unclosed or stray '[', ']', '(' or ')'."""


class UnmatchedRingClosure(SmilesParseError):
    """A ring-closure digit was opened but never closed (or vice versa)."""


class UnknownElement(SmilesParseError):
    """Element outside the supported 12-element set."""


class ValenceViolation(SmilesParseError):
    """Atom exceeds its allowed (charge-adjusted) valence."""


# --- featurization ---

class DomainMissing(DiazoirError):
    """Diazo context lacks a usable substituent domain."""


class LengthMismatch(DiazoirError):
    """Paired sequences have different lengths."""


class LayoutMismatch(DiazoirError):
    """Feature matrix does not match the layout a model was trained on."""


# --- learners ---

class EmptyDataset(DiazoirError):
    """Training data has no rows."""


class NonFiniteData(DiazoirError):
    """NaN or inf rejected at ingestion; learners never see missing values."""


class DimensionMismatch(DiazoirError):
    """Feature count differs between fit and predict."""


class SingularDesign(DiazoirError):
    """Linear solve failed despite regularization (numeric breakdown)."""


class TooFewSamples(DiazoirError):
    """Not enough rows for the requested fold structure."""


class DegenerateTarget(DiazoirError):
    """Target vector has zero variance where variance is required."""


class MissingCover(DiazoirError):
    """Tree lacks the per-node sample counts needed for SHAP."""


# --- dataset / harness ---

class MalformedRow(DiazoirError):
    """Dataset row failed validation (bad SMILES, missing column, bad number)."""


class NoDiazoGroup(DiazoirError):
    """Molecule contains no diazo group."""


class TooFewRows(DiazoirError):
    """Dataset too small for the requested split."""


class ZeroVariance(DiazoirError):
    """Correlation undefined for a constant sequence."""


class ModelFormatError(DiazoirError):
    """Model file is malformed or has an unsupported format version."""


class ConfigError(DiazoirError):
    """Config file contains unknown keys or out-of-range values."""
