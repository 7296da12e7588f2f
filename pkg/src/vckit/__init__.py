"""vckit: two-stage any-to-any voice conversion at desk scale."""

__version__ = "0.1.0"

from .errors import ConfigError, FormatError, RangeError, VcError

__all__ = ["ConfigError", "FormatError", "RangeError", "VcError", "__version__"]
