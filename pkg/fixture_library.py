import os
from pathlib import Path
from typing import List, Union

from dotenv import load_dotenv

from event_structure import EventStructureCore, ReversiblePes
from model_format import ParsedEs, ParsedNet, load_model

load_dotenv()

DEFAULT_FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"


def get_fixture_dir() -> Path:
    return Path(os.getenv("REVNETS_FIXTURE_DIR", str(DEFAULT_FIXTURE_DIR)))


def list_fixtures() -> List[str]:
    """File names of every bundled model, sorted"""
    directory = get_fixture_dir()
    return sorted(path.name for path in directory.iterdir() if path.suffix in (".es", ".net"))


def fixture_path(name: str) -> Path:
    path = get_fixture_dir() / name
    if not path.exists():
        raise FileNotFoundError(f"No bundled fixture named '{name}' in {get_fixture_dir()}")
    return path


def load_fixture(name: str) -> Union[ParsedEs, ParsedNet]:
    return load_model(fixture_path(name))


def load_structure(name: str) -> Union[EventStructureCore, ReversiblePes]:
    parsed = load_fixture(name)
    if not isinstance(parsed, ParsedEs):
        raise ValueError(f"Fixture '{name}' is a net, not an event structure")
    return parsed.structure


def load_net(name: str) -> ParsedNet:
    parsed = load_fixture(name)
    if not isinstance(parsed, ParsedNet):
        raise ValueError(f"Fixture '{name}' is an event structure, not a net")
    return parsed


def fixtures_of_kind(*kinds: str) -> List[str]:
    """Names of bundled fixtures whose declared kind is one of `kinds`"""
    return [name for name in list_fixtures() if load_fixture(name).kind in kinds]
