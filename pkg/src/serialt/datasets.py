"""Bundled example datasets and their registry."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .estimate import Series
from .errors import ValidationError
from .io import parse_series_text


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    filename: str
    paired: bool
    description: str


_DATASETS = (
    DatasetInfo("table1/patient9", "table1_patient9.csv", False,
                "fibromyalgia trial, 4 active-vs-placebo differences"),
    DatasetInfo("table1/patient18", "table1_patient18.csv", False,
                "fibromyalgia trial, 6 active-vs-placebo differences"),
    DatasetInfo("table1/patient23", "table1_patient23.csv", False,
                "fibromyalgia trial, 4 active-vs-placebo differences"),
    DatasetInfo("table1/patient17", "table1_patient17.csv", False,
                "fibromyalgia trial, 4 active-vs-placebo differences"),
    DatasetInfo("table1/patient15", "table1_patient15.csv", False,
                "fibromyalgia trial, 4 active-vs-placebo differences"),
    DatasetInfo("table1/patient12", "table1_patient12.csv", False,
                "fibromyalgia trial, 4 active-vs-placebo differences"),
    DatasetInfo("table2/pre", "table2_pre.csv", False,
                "delay discounting, 8 pre-treatment indifference points"),
    DatasetInfo("table2/post", "table2_post.csv", False,
                "delay discounting, 8 post-treatment indifference points"),
    DatasetInfo("table2/prepost", "table2_prepost.csv", True,
                "delay discounting, pre (a) and post (b) paired by delay"),
    DatasetInfo("table2/diff", "table2_diff.csv", False,
                "delay discounting, pre-minus-post differences"),
)

_BY_NAME = {info.name: info for info in _DATASETS}

#: Table 1 patients in the published row order.
TABLE1_PATIENTS = (9, 18, 23, 17, 15, 12)


def list_datasets() -> tuple[DatasetInfo, ...]:
    return _DATASETS


def load(name: str) -> Series | tuple[Series, Series]:
    """Load a bundled dataset by registry name."""
    info = _BY_NAME.get(name)
    if info is None:
        known = ", ".join(sorted(_BY_NAME))
        raise ValidationError(f"unknown dataset {name!r}; available: {known}")
    text = resources.files("serialt.data").joinpath(info.filename).read_text()
    return parse_series_text(text, origin=f"dataset:{name}")
