"""Exception types raised by linkprofiler."""


class InputError(ValueError):
    """Malformed input data; carries the offending file and line when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class ConfigError(ValueError):
    """Invalid hyper-parameters or configuration file."""


class DegenerateRunError(RuntimeError):
    """The inputs leave nothing to optimize (e.g. no constrained pairs)."""
