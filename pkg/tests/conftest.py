from pathlib import Path

import pytest

from sightline.io.dsl import load_scenario
from sightline.io.events import load_events
from sightline.surveillance import SortingReport, WatchContext, social_sort, surveil

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def pipeline(fixtures):
    """Run a bundled scenario end to end and return its SortingReport."""

    def run(stem: str) -> SortingReport:
        model = load_scenario(str(fixtures / f"{stem}.svl"))
        records = load_events(str(fixtures / f"{stem}_events.jsonl"))
        ctx = WatchContext(
            attrs=tuple(model.attributes.values()),
            key=model.observe.key,
            scheme=model.schemes[model.observe.scheme],
        )
        report = surveil([r.event for r in records], ctx)
        categories = social_sort(report, model.sort_keys)
        return SortingReport(report, tuple(categories), model.sort_keys)

    return run
