"""Exception types shared across the package."""


class ItemsimError(Exception):
    """Base class for all errors raised by itemsim."""


class ParseError(ItemsimError):
    """Syntax error in robot DSL source, with 1-based position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class ConfigError(ItemsimError):
    """Invalid pipeline configuration."""
