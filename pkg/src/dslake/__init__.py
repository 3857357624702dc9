"""dslake: a knowledge-based query language and MapReduce engine over a
simulated distributed file storage, shipped with a cyclone-path analysis
domain plugin and a storm-surge surrogate package."""

from dslake.lang import QueryAst, format_query, parse, tokenize, validate
from dslake.registry import KnowledgeRegistry
from dslake.storage import DataFile, StorageLayout, place
from dslake.engine import Engine, EngineConfig, TaskRequest, submit
from dslake.report import ResultDocument

__version__ = "0.1.0"

__all__ = [
    "QueryAst",
    "parse",
    "tokenize",
    "format_query",
    "validate",
    "KnowledgeRegistry",
    "StorageLayout",
    "DataFile",
    "place",
    "Engine",
    "EngineConfig",
    "TaskRequest",
    "submit",
    "ResultDocument",
    "__version__",
]
