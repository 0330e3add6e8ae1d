from .batches import BatchService
from .corpus import CorpusService
from .runs import RunReportService

__all__ = [
    "BatchService",
    "CorpusService",
    "RunReportService",
]
