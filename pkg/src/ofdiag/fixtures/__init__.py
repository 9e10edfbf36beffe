"""Bundled example models."""
from importlib import resources

from ..model import DesModel, parse_model

NAMES = ("g1", "g2like")


def fixture_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.json")


def load_fixture(name: str) -> DesModel:
    return parse_model(fixture_path(name).read_text(encoding="utf-8"))
