import json

import pytest

from weylnichols.cache import (
    CacheError, class_cache_path, read_class_cache, read_rows, rows_cache_path, write_class_cache, write_rows,
)
from weylnichols.classes import discover_classes


@pytest.fixture(scope="module")
def e6_discovered(e6):
    return discover_classes(e6.rs, e6.group, seed=1)


def test_class_cache_round_trip(tmp_path, e6, e6_discovered):
    path = class_cache_path(tmp_path, "E6", 1)
    write_class_cache(path, e6_discovered)
    cd = read_class_cache(path, e6.rs, e6.group)
    assert [c.representative for c in cd.classes] == [c.representative for c in e6_discovered.classes]
    assert [c.centralizer_order for c in cd.classes] == [c.centralizer_order for c in e6_discovered.classes]
    assert cd.power_maps == e6_discovered.power_maps
    assert read_class_cache(tmp_path / "absent.json", e6.rs, e6.group) is None


def _rewrite(path, edit):
    header, body = path.read_text().split("\n", 1)
    doc = json.loads(body)
    edit(doc)
    path.write_text(header + "\n" + json.dumps(doc))


@pytest.mark.parametrize("edit", [
    lambda d: d["data"]["power_maps"][5].__setitem__(0, 3),
    lambda d: d["data"]["centralizer_orders"].__setitem__(4, "7"),
    lambda d: d["data"].__setitem__("order", "51841"),
    lambda d: d["data"]["representatives"].reverse(),
    lambda d: d.__setitem__("group", "F4"),
])
def test_tampered_class_cache_is_refused(tmp_path, e6, e6_discovered, edit):
    path = class_cache_path(tmp_path, "E6", 1)
    write_class_cache(path, e6_discovered)
    _rewrite(path, edit)
    with pytest.raises(CacheError):
        read_class_cache(path, e6.rs, e6.group)


def test_foreign_headers_are_refused(tmp_path):
    path = rows_cache_path(tmp_path, "G2", 0)
    write_rows(path, "G2", {"0": {"class": 0}})
    assert read_rows(path, "G2") == {"0": {"class": 0}}
    with pytest.raises(CacheError):
        read_rows(path, "F4")
    header, body = path.read_text().split("\n", 1)
    path.write_text(header.replace('"schema": 1', '"schema": 99') + "\n" + body)
    with pytest.raises(CacheError):
        read_rows(path, "G2")
    path.write_text("not json\n{}")
    with pytest.raises(CacheError):
        read_rows(path, "G2")
