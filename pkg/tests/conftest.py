from pathlib import Path

import pytest

from circuitsmith.llmgateway import Provider
from circuitsmith.partsdb import bundled_kb, bundled_kb_path
from circuitsmith.pipeline import bundled_template

DATA_DIR = bundled_kb_path().parent
TRANSCRIPTS = DATA_DIR / "transcripts"
GOLDEN = DATA_DIR / "golden"


@pytest.fixture(scope="session")
def kb():
    return bundled_kb()


@pytest.fixture(scope="session")
def template():
    return bundled_template()


@pytest.fixture
def replay_button_led():
    return Provider.replay(TRANSCRIPTS / "button_led.jsonl")


@pytest.fixture
def replay_button_led_maxiter():
    return Provider.replay(TRANSCRIPTS / "button_led_maxiter.jsonl")


@pytest.fixture
def replay_session():
    return Provider.replay(TRANSCRIPTS / "session_refine.jsonl")


@pytest.fixture
def replay_micro25():
    return Provider.replay(TRANSCRIPTS / "micro25.jsonl")


@pytest.fixture
def replay_micro25_corrupt():
    return Provider.replay(TRANSCRIPTS / "micro25_corrupt.jsonl")
