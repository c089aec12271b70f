import contextlib
import json
import logging
import os
import pathlib
import tempfile
import typing as T

import toml

import canalyzing_fq
from canalyzing_fq.function import AnfPolynomial, TruthTable, from_record, to_record


__all__ = [
    "dumps_functions",
    "make_temp_file_path",
    "read_functions",
    "write_functions",
]

logger = logging.getLogger(__name__)

Function = T.Union[TruthTable, AnfPolynomial]


@contextlib.contextmanager
def make_temp_file_path(cleanup=True, dir=None):
    fd, name = tempfile.mkstemp(dir=dir)
    os.close(fd)
    path = pathlib.Path(name)
    try:
        yield path
    finally:
        if cleanup and path.exists():
            path.unlink()


def _format(path: pathlib.Path) -> str:
    suffix = path.suffix.lower()
    if suffix not in (".json", ".toml"):
        raise canalyzing_fq.FunctionFileError(
            f"Cannot tell the format of {path}; use a .json or .toml suffix."
        )
    return suffix[1:]


def read_functions(path: T.Union[str, pathlib.Path]) -> T.List[Function]:
    """Read one record, or a `functions` list of records, from a JSON or TOML file."""
    path = pathlib.Path(path)
    kind = _format(path)
    try:
        text = path.read_text()
        document = json.loads(text) if kind == "json" else toml.loads(text)
    except (OSError, ValueError) as e:
        raise canalyzing_fq.FunctionFileError(f"Cannot read {path}: {e}") from e
    if not isinstance(document, dict):
        raise canalyzing_fq.FunctionFileError(f"{path} must hold a record or a list.")
    records = document["functions"] if "functions" in document else [document]
    if not isinstance(records, list) or not records:
        raise canalyzing_fq.FunctionFileError(f"{path} has an empty 'functions' list.")
    logger.debug("Read %d function record(s) from %s", len(records), path)
    return [from_record(record) for record in records]


def dumps_functions(functions: T.Sequence[Function], kind: str = "json") -> str:
    document = {"functions": [to_record(f) for f in functions]}
    if kind == "toml":
        return toml.dumps(document)
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_functions(
    path: T.Union[str, pathlib.Path],
    functions: T.Sequence[Function],
    overwrite: bool = False,
) -> pathlib.Path:
    """Atomically write a `functions` list; refuse to replace a file unless told to."""
    path = pathlib.Path(path)
    text = dumps_functions(functions, _format(path))
    with make_temp_file_path(dir=path.parent) as temp_file:
        temp_file.write_text(text)
        if path.exists() and not overwrite:
            raise FileExistsError(f"{path} already exists.")
        return temp_file.replace(path)
