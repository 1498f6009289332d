"""Instance file format: round-trips, defaults, and error reporting."""

import pytest

from subcover.core import (
    DualityError,
    Oracle,
    ParseError,
    SetSystem,
    read_instance,
    write_instance,
)
from subcover.lowerbound import gen_slab_instance


def sample_system():
    sys_ = SetSystem.from_sets(3, 4, {1: [1, 2, 4], 2: [2, 3], 3: [4]})
    sys_.meta["generator"] = "test"
    sys_.meta["k"] = "2"
    return sys_


def test_write_read_round_trip_bytes(tmp_path):
    path = tmp_path / "inst.txt"
    write_instance(sample_system(), path)
    first = path.read_bytes()
    reread = read_instance(path)
    write_instance(reread, path)
    assert path.read_bytes() == first
    assert reread.meta == {"generator": "test", "k": "2"}


def test_elt_only_file_derives_ascending_set_section(tmp_path):
    path = tmp_path / "elt_only.txt"
    path.write_text("SETCOVER 1\nm=3 n=4\nELT\n1: 1 2 4\n2: 2 3\n3: 4\n")
    sys_ = read_instance(path)
    assert sys_.set_of == [[1], [1, 2], [2], [1, 3]]
    # round trip stays byte-exact for ELT-only files too
    write_instance(sys_, path)
    assert path.read_text() == "SETCOVER 1\nm=3 n=4\nELT\n1: 1 2 4\n2: 2 3\n3: 4\n"


def test_empty_set_and_meta_round_trip(tmp_path):
    sys_ = SetSystem.from_sets(2, 2, {1: [1, 2], 2: []})
    sys_.meta["label"] = "yes"
    path = tmp_path / "empty.txt"
    write_instance(sys_, path)
    text = path.read_text()
    assert "2:\n" in text
    assert text.endswith("META label=yes\n")
    assert read_instance(path).elt_of == [[1, 2], []]


def test_parse_error_carries_line_number(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("SETCOVER 1\nm=2 n=2\nELT\n1: 1\n2: bogus\n")
    with pytest.raises(ParseError) as exc:
        read_instance(path)
    assert exc.value.line == 5
    path.write_text("NOPE\n")
    with pytest.raises(ParseError) as exc:
        read_instance(path)
    assert exc.value.line == 1


def test_out_of_range_and_duplicate_ids_rejected(tmp_path):
    path = tmp_path / "range.txt"
    path.write_text("SETCOVER 1\nm=2 n=2\nELT\n1: 1 3\n2: 2\n")
    with pytest.raises(ParseError):
        read_instance(path)
    path.write_text("SETCOVER 1\nm=2 n=2\nELT\n1: 1 1\n2: 2\n")
    with pytest.raises(ParseError):
        read_instance(path)


def test_disagreeing_sections_raise_duality_error(tmp_path):
    path = tmp_path / "dual.txt"
    path.write_text(
        "SETCOVER 1\nm=2 n=2\nELT\n1: 1 2\n2: 2\nSET\n1: 1\n2: 1\n"
    )
    with pytest.raises(DualityError):
        read_instance(path)


def test_slab_post_swap_tables_survive_serialization(tmp_path):
    inst = gen_slab_instance(12, 3, swaps=[(3, 2), None, None])
    path = tmp_path / "slab.txt"
    write_instance(inst.system, path)
    loaded = read_instance(path)
    assert loaded.elt_of == inst.system.elt_of
    assert loaded.set_of == inst.system.set_of
    o = Oracle(loaded)
    assert o.elt_of(3, 2) == 4
    assert o.set_of(4, 6) == 3
