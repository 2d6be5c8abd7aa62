'''
This module provides utility functions for loading default settings from an
INI file (falling back to pyproject.toml), then from the environment.
'''


# core libraries
import configparser
import logging
import os
import pathlib
from typing import Any, Callable, Dict

# third party libraries
import toml


# name of the configuration file and of its section / pyproject table
CONFIG_FILE_NAME = "crosslingual_sts.ini"
CONFIG_SECTION = "crosslingual_sts"

# prefix of the environment variables overriding the configuration file
ENV_PREFIX = "XSTS_"

# recognised keys, their converters, and built-in defaults
_CONVERTERS: Dict[str, Callable[[Any], Any]] = {
    "seed": int,
    "epochs": int,
    "negatives": int,
    "margin": float,
    "learning-rate": float,
    "distance": str,
    "ridge": float,
    "max-vocab": int,
    "rank-r": int,
    "weighting": str,
    "k": int,
}

DEFAULTS: Dict[str, Any] = {
    "seed": 0,
    "epochs": 5,
    "negatives": 50,
    "margin": 0.0,
    "learning-rate": 0.01,
    "distance": "euclidean",
    "ridge": None,
    "max-vocab": None,
    "rank-r": 4,
    "weighting": "uniform",
    "k": 20,
}


def _find_config_file(project_dir: pathlib.Path) -> pathlib.Path | None:
    '''
    Search the tree starting at the given directory for a file called
    crosslingual_sts.ini.
    '''
    for root, _, files in os.walk(project_dir):
        for file in files:
            if file.lower() == CONFIG_FILE_NAME:
                return pathlib.Path(root) / file

    # not found
    return None


def load_config() -> Dict[str, Any] | None:
    '''
    Attempt to find a file called crosslingual_sts.ini in the current tree and
    load the configuration. If not found, attempt to load configuration values
    from the pyproject toml file.
    '''
    # search from the project dir
    project_dir = pathlib.Path.cwd()

    # search for a config file
    if ini_file := _find_config_file(project_dir):
        config = configparser.ConfigParser()
        config.read(ini_file)
        config_dict = {}
        if config.has_section(CONFIG_SECTION):
            for key, value in config.items(CONFIG_SECTION):
                config_dict[key] = value
        logging.debug("Loaded configuration from '%s'", ini_file)
        return config_dict

    # load the pyproject.toml file
    pyproject_toml = project_dir / "pyproject.toml"
    if pyproject_toml.exists():
        project_dict = toml.load(pyproject_toml)
        if section := project_dict.get("tool", {}).get(CONFIG_SECTION, {}):
            logging.debug("Loaded configuration from '%s'", pyproject_toml)
            return section

    # no configuration
    return None


def read_environment() -> Dict[str, str]:
    '''
    Collect the XSTS_* environment variables for every recognised key.
    '''
    found = {}
    for key in _CONVERTERS:
        if value := os.environ.get(ENV_PREFIX + key.upper().replace("-", "_"), ""):
            found[key] = value
    return found


def _convert(key: str, value: Any) -> Any:
    '''
    Convert a raw configuration value for the given key. Empty strings and the
    word "none" stand for an unset value.
    '''
    if value is None or (isinstance(value, str) and value.strip().lower() in ("", "none")):
        return None
    return _CONVERTERS[key](value)


def resolve_settings() -> Dict[str, Any]:
    '''
    Resolve the default settings through the cascade: built-in defaults, then
    the configuration file, then the environment. Command line flags are
    applied on top of this by the caller.
    '''
    settings = dict(DEFAULTS)
    for source_name, source in (("configuration file", load_config() or {}), ("environment", read_environment())):
        for key, value in source.items():
            key = key.lower().replace("_", "-")
            if key not in _CONVERTERS:
                logging.warning("Ignoring unknown setting '%s' from the %s", key, source_name)
                continue
            try:
                settings[key] = _convert(key, value)
            except ValueError as err:
                logging.critical("Setting '%s' from the %s has an invalid value '%s'", key, source_name, value)
                raise SystemExit(1) from err

    return settings
