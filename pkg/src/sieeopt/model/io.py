"""
Input/Output Manager
Reads scenario files and writes experiment outputs (CSV tables + manifest).
"""
import csv
import json
import logging
import os
import tomllib
from importlib.metadata import PackageNotFoundError, version
from typing import Any, Dict, Iterable, Optional, Sequence

from sieeopt.errors import InvalidParameterError
from sieeopt.model.scenario import ScenarioConfig

# Get module logger
logger = logging.getLogger(__name__)

try:
    APP_VERSION = version("sieeopt")
except PackageNotFoundError:
    APP_VERSION = "0.0.0-dev"

MANIFEST_NAME = "manifest.json"


class IOManager:

    @staticmethod
    def read_scenario_file(filepath: str) -> Dict[str, Any]:
        """
        Reads a flat TOML key/value file.

        Raises:
            InvalidParameterError: Unparsable file or nested tables.
            OSError: Unreadable file.
        """
        logger.info(f"Loading scenario from: {filepath}")
        try:
            with open(filepath, "rb") as f:
                data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            logger.exception(f"Failed to parse scenario file: {e}")
            raise InvalidParameterError(f"Scenario file '{filepath}' is not valid TOML: {e}") from e

        nested = [key for key, value in data.items() if isinstance(value, dict)]
        if nested:
            raise InvalidParameterError(f"Scenario file must be flat, found tables {nested}")
        return data

    @staticmethod
    def load_scenario(
        filepath: Optional[str] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ) -> ScenarioConfig:
        """File values first, then non-None overrides (CLI flags win)."""
        data = IOManager.read_scenario_file(filepath) if filepath else {}
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        return ScenarioConfig.from_dict(data)

    @staticmethod
    def write_csv(filepath: str, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]) -> None:
        """Writes rows with a fixed header. Floats are written with repr precision."""
        os.makedirs(os.path.dirname(os.path.abspath(filepath)), exist_ok=True)
        with open(filepath, "w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
            writer.writeheader()
            count = 0
            for row in rows:
                writer.writerow({key: repr(value) if isinstance(value, float) else value for key, value in row.items()})
                count += 1
        logger.info(f"Wrote {count} rows to: {filepath}")

    @staticmethod
    def read_csv(filepath: str) -> list[Dict[str, str]]:
        with open(filepath, newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))

    @staticmethod
    def write_manifest(out_dir: str, command: str, config: Dict[str, Any], seed: Optional[int]) -> str:
        """Writes the resolved configuration of a run next to its outputs."""
        os.makedirs(out_dir, exist_ok=True)
        filepath = os.path.join(out_dir, MANIFEST_NAME)
        manifest = {
            "command": command,
            "version": APP_VERSION,
            "seed": seed,
            "config": config,
        }
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
        logger.debug(f"Manifest written to: {filepath}")
        return filepath
