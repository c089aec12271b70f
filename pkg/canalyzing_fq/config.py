import logging
import os
import typing as T
from pathlib import Path

import toml

import canalyzing_fq
from canalyzing_fq.counting import DEFAULT_CHUNK_SIZE


__all__ = [
    "DEFAULTS",
    "Settings",
    "SettingsStore",
    "discover_settings",
    "settings_path",
]

DEFAULTS: T.Dict[str, T.Any] = {
    "workers": 1,
    "chunk_size": DEFAULT_CHUNK_SIZE,
    "digits": 12,
    "log_level": "WARNING",
}

_MINIMUMS = {"workers": 1, "chunk_size": 1, "digits": 0}

_LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class Settings(T.NamedTuple):
    workers: int
    chunk_size: int
    digits: int
    log_level: str


def _coerce(key: str, value: T.Any) -> T.Any:
    if key not in DEFAULTS:
        raise KeyError(key)
    if key == "log_level":
        level = str(value).upper()
        if level not in _LOG_LEVELS:
            raise canalyzing_fq.CanalyzingError(
                f"Invalid value {value!r} for setting '{key}'; "
                f"use one of {_LOG_LEVELS}."
            )
        return level
    try:
        number = int(value)
    except (TypeError, ValueError) as e:
        raise canalyzing_fq.CanalyzingError(
            f"Invalid value {value!r} for setting '{key}'; expected an integer."
        ) from e
    if isinstance(value, bool) or number < _MINIMUMS[key]:
        raise canalyzing_fq.CanalyzingError(
            f"Invalid value {value!r} for setting '{key}'; minimum is {_MINIMUMS[key]}."
        )
    return number


class SettingsStore:
    SETTINGS_FILE = Path.home() / ".canalyzing" / "config.toml"

    def __init__(self, path: T.Optional[Path] = None):
        self.path = Path(path) if path else self.SETTINGS_FILE
        self._store_timestamp = -1.0
        self._store: T.Dict[str, T.Any] = {}
        self._refresh()

    def _refresh(self):
        if not self.path.exists():
            self._store = {}
            self._store_timestamp = -1.0
            return
        current_timestamp = self.path.stat().st_mtime
        if self._store_timestamp < current_timestamp:
            try:
                self._store = toml.loads(self.path.read_text())
            except toml.TomlDecodeError as e:
                raise canalyzing_fq.CanalyzingError(
                    f"Cannot parse settings file {self.path}: {e}"
                ) from e
            self._store_timestamp = current_timestamp

    def _save(self):
        # Create directory and file with private modes if they don't exist yet
        self.path.parent.mkdir(mode=0o700, parents=True, exist_ok=True)
        self.path.touch(mode=0o600, exist_ok=True)
        self.path.write_text(toml.dumps(self._store))
        self._store_timestamp = self.path.stat().st_mtime

    def get(self, key: str) -> T.Any:
        """The stored value of key, or its default."""
        self._refresh()
        return _coerce(key, self._store.get(key, DEFAULTS[key]))

    def set(self, key: str, value: T.Any):
        self._refresh()
        self._store[key] = _coerce(key, value)
        self._save()

    def remove(self, key: str):
        self._refresh()
        if key in self._store:
            del self._store[key]
        self._save()

    def get_keys(self) -> T.List[str]:
        self._refresh()
        return list(self._store.keys())


def settings_path(path: T.Optional[Path] = None) -> Path:
    """`path`, else $CANALYZING_CONFIG, else SettingsStore.SETTINGS_FILE."""
    if path is not None:
        return Path(path)
    if os.environ.get("CANALYZING_CONFIG"):
        return Path(os.environ["CANALYZING_CONFIG"])
    return SettingsStore.SETTINGS_FILE


def discover_settings(
    path: T.Optional[Path] = None, **overrides: T.Any
) -> Settings:
    """Merge defaults, the settings file, CANALYZING_* variables and overrides.

    The file is `path`, else $CANALYZING_CONFIG, else ~/.canalyzing/config.toml.
    Overrides that are None are ignored.

    """
    store = SettingsStore(settings_path(path))
    values = {}
    for key in DEFAULTS:
        env_value = os.environ.get(f"CANALYZING_{key.upper()}")
        if overrides.get(key) is not None:
            values[key] = _coerce(key, overrides[key])
        elif env_value:
            values[key] = _coerce(key, env_value)
        else:
            values[key] = store.get(key)
    logging.getLogger(__name__).debug("Settings from %s: %s", store.path, values)
    return Settings(**values)
