import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(Path(__file__).parent))

SMOKE = "blocks 1\nblock 1 vars a threshold 1\nformula a\n"
CONTRADICTION = "blocks 1\nblock 1 vars a threshold 1\nformula a & !a\n"
TAUTOLOGY2 = "blocks 2\nblock 1 vars a threshold 1\nblock 2 vars b threshold 2\nformula a | !a\n"


@pytest.fixture(scope="session")
def main_corpus_dir():
    return ROOT / "corpus" / "main"


@pytest.fixture(scope="session")
def smoke_dir():
    return ROOT / "corpus" / "smoke"


@pytest.fixture(scope="session")
def main_corpus(main_corpus_dir):
    from odegadget.verify import Corpus
    return Corpus.load(main_corpus_dir)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
