"""Exception hierarchy shared across the toolkit.

Every error carries a short category code so the CLI can emit a
machine-parsable one-line failure (``CATEGORY/message``) and shell
pipelines can branch on the failure class.
"""


class VcError(Exception):
    """Base class for all domain errors raised by vckit."""

    category = "CONFIG"


class RangeError(VcError):
    """A numeric argument is outside its valid range."""

    category = "RANGE"


class FormatError(VcError):
    """Malformed or unsupported input data (files, arrays, vectors)."""

    category = "FORMAT"


class ConfigError(VcError):
    """Bad configuration: unknown keys, missing checkpoints, bad wiring."""

    category = "CONFIG"
