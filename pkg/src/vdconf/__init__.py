"""Interactive configuration over compiled decision diagrams.

Offline: parse a finite-domain model and compile its solution space into a
reduced ordered BDD. Online: answer valid-domain queries per user choice,
backtrack-free, through a library API, a CLI, an HTTP service, and a web UI.
"""

from .bdd import TERM0, TERM1, BddStore, NodeId, compact, export_dot
from .cvd import DomainEngine, valid_domains
from .encode import (
    BoolLayout,
    CompiledSpace,
    compile_model,
    read_artifact,
    restrict_value,
    write_artifact,
)
from .model import (
    Assignment,
    ConfigModel,
    Domain,
    Formula,
    ModelError,
    Variable,
    eval_formula,
    oracle_solutions,
    oracle_valid_domains,
    parse_model,
    serialize_model,
)
from .session import Session, SessionError, start

__version__ = "0.1.0"

__all__ = [
    "TERM0",
    "TERM1",
    "BddStore",
    "NodeId",
    "compact",
    "export_dot",
    "DomainEngine",
    "valid_domains",
    "BoolLayout",
    "CompiledSpace",
    "compile_model",
    "read_artifact",
    "restrict_value",
    "write_artifact",
    "Assignment",
    "ConfigModel",
    "Domain",
    "Formula",
    "ModelError",
    "Variable",
    "eval_formula",
    "oracle_solutions",
    "oracle_valid_domains",
    "parse_model",
    "serialize_model",
    "Session",
    "SessionError",
    "start",
    "__version__",
]
