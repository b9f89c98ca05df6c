"""Per-criterion outcomes, printed at the end of the session by conftest."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str):
    RESULTS[n] = (ok, detail)
    assert ok, detail
