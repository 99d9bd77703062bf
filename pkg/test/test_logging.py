#!/usr/bin/env python3
"""
Test logging levels and the messages emitted by the library and CLI
"""

import sys
import os
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import logging

import pytest

from fixture_library import fixture_path, load_net
from inhibitor_net import explore_states
from main import configure_logging, main


@pytest.fixture(autouse=True)
def restore_root_level():
    root = logging.getLogger()
    level = root.level
    yield
    root.setLevel(level)


def test_verbosity_flags(monkeypatch):
    monkeypatch.delenv("REVNETS_LOG_LEVEL", raising=False)
    configure_logging()
    assert logging.getLogger().level == logging.WARNING
    configure_logging(verbose=True)
    assert logging.getLogger().level == logging.DEBUG
    configure_logging(quiet=True)
    assert logging.getLogger().level == logging.ERROR


def test_level_from_environment(monkeypatch):
    monkeypatch.setenv("REVNETS_LOG_LEVEL", "info")
    configure_logging()
    assert logging.getLogger().level == logging.INFO
    monkeypatch.setenv("REVNETS_LOG_LEVEL", "chatty")
    configure_logging()
    assert logging.getLogger().level == logging.WARNING


def test_bounded_search_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="inhibitor_net"):
        explore_states(load_net("concurrent_undo.net").net)
    assert [r.levelname for r in caplog.records] == ["WARNING"]
    assert "bounding state search at depth 14" in caplog.text


def test_exact_search_is_quiet(caplog):
    with caplog.at_level(logging.WARNING, logger="inhibitor_net"):
        explore_states(load_net("inhibitor_intro.net").net)
    assert caplog.records == []


def test_cli_logs_errors(caplog, capsys):
    with caplog.at_level(logging.ERROR):
        code = main(["fire", str(fixture_path("inhibitor_intro.net")), "--script", "b"])
    assert code == 3
    assert any(r.name == "main" and r.message.startswith("fire: Step") for r in caplog.records)
    assert "error: Step {b} not enabled" in capsys.readouterr().err


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
