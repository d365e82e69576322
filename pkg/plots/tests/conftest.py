from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

KINDS = ["probs", "roc", "qa_grid", "detect_sim", "rangefind", "pcorrect"]


@pytest.fixture
def golden(request):
    def path(kind: str) -> Path:
        return DATA / f"{kind}.csv"

    return path


def mangle_header(text: str) -> str:
    """Corrupt the header row (second non-blank line) of a golden CSV."""
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            first, _, rest = line.partition(",")
            lines[i] = f"{first}_zzz,{rest}"
            break
    return "\n".join(lines) + "\n"
