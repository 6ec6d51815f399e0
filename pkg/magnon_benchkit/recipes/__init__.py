"""Packaged experiment recipes, one per reproduced measurement."""

from __future__ import annotations

from functools import cache
from importlib import resources

from ..config import ConfigError, ExperimentConfig, parse_config

__all__ = [
    "RECIPE_PACKAGE",
    "list_recipes",
    "recipe_text",
    "load_recipe",
    "recipe_command",
    "expected_outputs",
]

RECIPE_PACKAGE = __name__
EXPECT_PREFIX = "# expect:"
COMMAND_PREFIX = "# command:"


def list_recipes() -> tuple[str, ...]:
    files = resources.files(RECIPE_PACKAGE).iterdir()
    return tuple(sorted(f.name[: -len(".ini")] for f in files if f.name.endswith(".ini")))


@cache
def recipe_text(name: str) -> str:
    path = resources.files(RECIPE_PACKAGE).joinpath(f"{name}.ini")
    if not path.is_file():
        known = ", ".join(list_recipes())
        raise ConfigError(f"unknown recipe {name!r} (known: {known})")
    return path.read_text(encoding="utf-8")


def load_recipe(name: str) -> ExperimentConfig:
    return parse_config(recipe_text(name), source=f"recipe:{name}")


def expected_outputs(name: str) -> tuple[str, ...]:
    """The ``# expect:`` lines of a recipe: reference values a run should reproduce."""
    lines = []
    for line in recipe_text(name).splitlines():
        stripped = line.strip()
        if stripped.startswith(EXPECT_PREFIX):
            lines.append(stripped[len(EXPECT_PREFIX) :].strip())
    return tuple(lines)


def recipe_command(name: str) -> str:
    """The subcommand a recipe is written for (its ``# command:`` line)."""
    for line in recipe_text(name).splitlines():
        stripped = line.strip()
        if stripped.startswith(COMMAND_PREFIX):
            return stripped[len(COMMAND_PREFIX) :].strip()
    raise ConfigError(f"recipe {name!r} names no command")
