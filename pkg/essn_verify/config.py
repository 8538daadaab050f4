# Python Version: 3.x
"""This module reads the optional TOML settings file. Each top-level table configures one subcommand ([workload], [engine], [experiment]).
"""

import pathlib
from logging import getLogger
from typing import *

import toml

logger = getLogger(__name__)

default_config_path = pathlib.Path('.essn-verify/config.toml')

_settings: Dict[str, Any] = {}
_settings_path: Optional[pathlib.Path] = None


def set_config_path(config_path: pathlib.Path) -> None:
    """set_config_path replaces the current settings with the content of config_path. A missing file means no settings.
    """

    global _settings_path  # pylint: disable=invalid-name
    _settings.clear()
    _settings_path = config_path
    if config_path.exists():
        _settings.update(toml.load(str(config_path)))
        logger.info('settings from %s: %s', config_path, sorted(_settings))
    else:
        logger.info('%s does not exist; use the defaults', config_path)


def get_config() -> Dict[str, Any]:
    if _settings_path is None:
        set_config_path(default_config_path)
    return _settings


def get_section(name: str) -> Dict[str, Any]:
    section = get_config().get(name, {})
    if isinstance(section, dict):
        return section
    logger.warning('[%s] in the config file is not a table; ignored', name)
    return {}


def pick(value: Any, section: str, key: str, default: Any) -> Any:
    """pick resolves one setting: the command-line value if given, then the config file, then the default.
    """

    if value is not None:
        return value
    return get_section(section).get(key, default)
