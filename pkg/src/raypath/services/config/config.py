import json
import logging
from typing import Optional
from pathlib import Path

from ...shared.dicts import DotDict
from ...shared.errors import ConfigError


logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "~/.config/raypath/config.json"
COMMANDS = ("tcdf", "scdf", "mocomp", "compare", "fit-gmm", "monitor", "simulate", "reg-experiment", "convert")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class Config:
    """Represents the configuration for the raypath CLI.

    The file is a JSON object. ``log_level`` and ``use_colors`` tune console
    output; every other top-level key names a subcommand whose object mirrors
    that subcommand's flags, e.g. ``{"tcdf": {"radius": 2, "patch": "5x5"}}``.
    """

    def __init__(self, path: Optional[Path] = None):
        """Initialize the Config object.

        Args:
            path (Path): The path to the configuration file.

        Note:
            The default file is optional and silently skipped when missing; an
            explicitly given path must exist.
        """
        self._path: Path = (Path(path or DEFAULT_CONFIG_PATH)).expanduser()
        self.log_level: str = "WARNING"
        self.use_colors: bool = True
        self.commands = DotDict({})

        if self._path.exists():
            self.load_config()
        elif path is not None:
            raise ConfigError(f"config file {self._path} does not exist")

    def load_config(self):
        """Load configuration from file and update instance attributes.

        Raises:
            ConfigError: If the file is not a JSON object or a section is malformed
        """
        try:
            data = json.loads(self._path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise ConfigError(f"cannot read config {self._path}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"config {self._path} must hold a JSON object")

        log_level = str(data.pop("log_level", self.log_level)).upper()
        if log_level not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {', '.join(LOG_LEVELS)}, got {log_level!r}")
        self.log_level = log_level
        self.use_colors = bool(data.pop("use_colors", self.use_colors))

        for key, value in data.items():
            if key not in COMMANDS:
                logger.warning("ignoring unknown config key %r in %s", key, self._path)
                continue
            if not isinstance(value, dict):
                raise ConfigError(f"config section {key!r} must be an object")
            self.commands[key] = DotDict(value)

    def section(self, command: str) -> DotDict:
        """Flag values configured for ``command`` (empty when none)."""
        return self.commands.section(command)

    def defaults_for(self, command: str) -> dict:
        """Section values keyed by argparse destination (``min-pairs`` becomes ``min_pairs``)."""
        return {k.replace("-", "_"): v for k, v in self.section(command).items()}
