"""
Configuration & Path Management
===============================
This module serves as the central registry for file paths and global constants.

Why is this file needed?
------------------------
It prevents hardcoded paths scattered throughout the code. Package assets
(the default scenario file) are resolved relative to this module.

Exports:
    ASSETS_PATH (str): Absolute path to the assets directory.
    DEFAULT_SCENARIO_PATH (str): Absolute path to the default scenario file.
"""
import logging
import os
from pathlib import Path

logger = logging.getLogger(__name__)


def get_resource_path(relative_path: str) -> str:
    """
    Get absolute path to a resource shipped inside the package.
    """
    current_dir: Path = Path(__file__).parent
    return os.path.join(str(current_dir), relative_path)


# Global Constants
ASSETS_PATH: str = get_resource_path("assets")
DEFAULT_SCENARIO_PATH: str = os.path.join(ASSETS_PATH, "scenario_default.toml")

if not os.path.exists(ASSETS_PATH):
    logger.warning(f"Assets path not found at {ASSETS_PATH}")
