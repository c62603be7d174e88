"""Error hierarchy shared by every module and the CLI execution block."""


class ToolkitError(Exception):
    """Base class; the CLI turns it into a `[FATAL ERROR]` line and an exit code."""

    exit_code = 1


class InvalidArgumentError(ToolkitError, ValueError):
    pass


class DegenerateSeriesError(ToolkitError):
    pass


class EmptySeriesError(ToolkitError):
    pass


class InvalidModelError(ToolkitError, ValueError):
    pass


class UnsupportedInputError(ToolkitError):
    pass


class NoModelError(ToolkitError):
    pass


class ConfigError(ToolkitError):
    pass


class DegenerateColumnError(ToolkitError):
    def __init__(self, column: str, message: str = ""):
        self.column = column
        super().__init__(message or f"Column '{column}' has zero variance")


class CollinearityError(ToolkitError):
    def __init__(self, columns: list[str]):
        self.columns = list(columns)
        super().__init__(f"Design matrix is rank deficient; dependent columns: {self.columns}")


class CoverageError(ToolkitError):
    def __init__(self, label: str, time: int, offset: int):
        self.label = label
        self.time = time
        self.offset = offset
        super().__init__(
            f"Covariate '{label}' has no value at time {time + offset} "
            f"(target time {time}, offset {offset:+d})"
        )


class CsvParseError(ToolkitError):
    def __init__(self, path: str, message: str, row: int | None = None,
                 column: int | None = None, failures: list[dict] | None = None):
        self.path = path
        self.row = row
        self.column = column
        self.failures = list(failures or [])
        where = ""
        if row is not None:
            where += f" row {row}"
        if column is not None:
            where += f" column {column}"
        super().__init__(f"{path}:{where or ' header'}: {message}")


class UsageError(ToolkitError):
    exit_code = 2
