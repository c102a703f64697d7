"""
Error taxonomy and CLI exit codes
"""

from contextlib import contextmanager
from typing import Iterator, Optional


class PipelineError(ValueError):
    """Base error for every failure the pipeline reports to the user"""

    exit_code: int = 1

    def __init__(self, message: str, stage: Optional[str] = None) -> None:
        super().__init__(message)
        self.message = message
        self.stage = stage

    def __str__(self) -> str:
        if self.stage:
            return f"[{self.stage}] {self.message}"
        return self.message


class ConfigError(PipelineError):
    """Invalid configuration or CLI flags"""

    exit_code = 2


class DataError(PipelineError):
    """Input data cannot be loaded or violates a data invariant"""

    exit_code = 3


class DataIngestError(DataError):
    """Price, factor or score file problems"""


class FactorConstructionError(DataError):
    """Factor membership cannot be formed"""


class PortfolioError(DataError):
    """Portfolio cannot be built from the given ranking or universe"""


class NumericalError(PipelineError):
    """A numerical routine failed"""

    exit_code = 4


class RankDeficientError(NumericalError):
    """Design matrix is (numerically) rank deficient"""


class GraphConstructionError(NumericalError):
    """Correlation or filtered graph cannot be built"""


class EmbeddingError(NumericalError):
    """Random walks or skip-gram training failed"""


class MetricError(NumericalError):
    """A performance metric is undefined for the series"""


class SyntheticSpecError(NumericalError):
    """Synthetic market specification is infeasible"""


@contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag any pipeline error raised inside the block with the stage name"""
    try:
        yield
    except PipelineError as error:
        if error.stage is None:
            error.stage = name
        raise
