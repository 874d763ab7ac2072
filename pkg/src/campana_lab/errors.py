"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration errors exit 2, domain
errors exit 3, internal assertion failures exit 4.
"""


class CampanaLabError(Exception):
    """Base class for all library errors."""


class ConfigError(CampanaLabError):
    """Invalid configuration or unusable input (CLI exit 2)."""


class DomainError(CampanaLabError):
    """Valid configuration hit a mathematical limitation (CLI exit 3)."""


# -- groups / orbits ---------------------------------------------------------

class NotAGroup(ConfigError):
    """Cayley table fails the group axioms; carries the first violation."""


class UnknownName(ConfigError):
    """Unknown builtin group or field name."""


class InvalidCombination(ConfigError):
    """Unsupported (d, m): d composite with gcd(d, m) > 1."""


# -- fieldspec ---------------------------------------------------------------

class NotIrreducible(ConfigError):
    pass


class NotABasis(ConfigError):
    pass


class NotGalois(ConfigError):
    pass


class ZeroVector(ConfigError):
    pass


class BadPrimeForMinPoly(DomainError):
    """p divides disc(min_poly) in a configuration the artifact cannot use."""


class UnsupportedPrime(DomainError):
    """Partially ramified or index prime; valuation data unavailable."""


class PrecisionExhausted(DomainError):
    """Working precision p^k too small to decide a valuation; retry larger."""


# -- arith -------------------------------------------------------------------

class Unfactored(DomainError):
    """Factorization budget exhausted (practically unreachable at desk scale)."""


# -- localseries -------------------------------------------------------------

class RamifiedUnsupported(DomainError):
    """Local transforms at ramified places are not modelled."""


# -- analysis ----------------------------------------------------------------

class UnsupportedField(DomainError):
    """No Dirichlet-character decomposition known for this field."""


class InsufficientData(ConfigError):
    """Not enough checkpoints to fit an asymptotic."""
