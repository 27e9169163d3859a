import os
from functools import lru_cache
from pathlib import Path, PosixPath
from typing import Any

import toml

from ..exactlin import FieldSpec


DEFAULTS = {
    "paths": {"main_dir": ".", "projects_dir": "hhtannaka/projects"},
    "defaults": {"field": "QQ", "level": 6, "normalized": True},
    "acceptance": {"corpus_size": 25, "corpus_seed": 0, "corpus_field": "109", "corpus_level": 4},
}


@lru_cache(maxsize=None)
def get_config(toml_file: str = "hhtannaka.toml", sub_file: str = "paths", verbose=False) -> dict[str, Any]:
    """Loads the run configuration from xxx.toml in the working directory.

    Args:
        toml_file (str, optional): config file name
        sub_file (str, optional): section whose entries are turned into paths
        verbose (bool, optional): print the config

    Returns:
        config: dict
    """
    package_dir = PosixPath(os.getcwd())
    config_file = package_dir / toml_file

    config = {k: dict(v) for k, v in DEFAULTS.items()}
    if Path(config_file).is_file():
        with open(config_file, "r") as f:
            for key, section in toml.load(f).items():
                config.setdefault(key, {}).update(section)
    elif verbose:
        print(f"Did not find project`s toml file: {config_file}, using defaults")

    config["paths"].update({"main_dir": package_dir})
    if not Path(package_dir / config["paths"]["projects_dir"]).exists():
        config["paths"]["projects_dir"] = Path(__file__).resolve().parents[1] / "projects"

    if verbose:
        for key in config.keys():
            print(f"{key}: {config[key]}")

    for key2 in config.get(sub_file, {}):
        p = Path(config[sub_file][key2])
        if p.exists():
            config[sub_file][key2] = p

    return config


def defaults(toml_file: str = "hhtannaka.toml") -> dict[str, Any]:
    """[defaults] with the HHTANNAKA_FIELD / HHTANNAKA_LEVEL overrides applied."""
    out = dict(get_config(toml_file)["defaults"])
    if "HHTANNAKA_FIELD" in os.environ:
        out["field"] = os.environ["HHTANNAKA_FIELD"]
    if "HHTANNAKA_LEVEL" in os.environ:
        try:
            out["level"] = int(os.environ["HHTANNAKA_LEVEL"])
        except ValueError:
            raise ValueError(f"Unknown truncation level: {os.environ['HHTANNAKA_LEVEL']!r}") from None
    out["field"] = FieldSpec.from_string(str(out["field"]))
    return out
