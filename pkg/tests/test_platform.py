import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_platform, platform_doc
from refsim.errors import ParseError, UnknownResource, ValidationError
from refsim.platform import (SYSTEM, ResourceKind, core, domain, dump_platform, load_platform,
                             platform_from_dict, task)


def test_big_little_topology():
    info = make_platform()
    assert info.num_cores == 8
    assert len(info.freq_domains) == 2
    assert info.domain_of_core(5) == 1
    assert info.cores_in_domain(0) == (0, 1, 2, 3)
    assert info.type_of_core(6).name == "big"
    assert info.core_types[info.reference_type].name == "little"
    assert info.mem_latency == pytest.approx(100e-9)


def test_unknown_core():
    info = make_platform()
    with pytest.raises(UnknownResource):
        info.type_of_core(9)
    with pytest.raises(UnknownResource):
        info.cores_in_domain(2)
    with pytest.raises(UnknownResource):
        info.check(core(8))


def test_empty_freqs_names_field():
    doc = platform_doc()
    doc["domains"][0]["freqs_ghz"] = []
    with pytest.raises(ValidationError) as exc:
        platform_from_dict(doc)
    assert exc.value.field == "available_freqs"
    assert "available_freqs" in str(exc.value)


@pytest.mark.parametrize("freqs", [[1.0, 0.5], [0.5, 0.5], [0.0, 1.0], [-1.0]])
def test_bad_freq_tables(freqs):
    doc = platform_doc()
    doc["domains"][1]["freqs_ghz"] = freqs
    with pytest.raises(ValidationError) as exc:
        platform_from_dict(doc)
    assert exc.value.field == "available_freqs"


def test_no_reference_type():
    doc = platform_doc()
    doc["core_types"][0]["reference"] = False
    with pytest.raises(ValidationError, match="no reference core type"):
        platform_from_dict(doc)


def test_reference_must_have_unit_scale():
    doc = platform_doc()
    doc["core_types"][0]["cpi_scale"] = 0.9
    with pytest.raises(ValidationError):
        platform_from_dict(doc)


@pytest.mark.parametrize("key,value", [("cpi_scale", 0), ("dyn_coeff_w_per_ghz3", -1),
                                       ("static_active_w", -0.1), ("idle_w", -1)])
def test_coefficient_bounds(key, value):
    doc = platform_doc()
    doc["core_types"][1][key] = value
    with pytest.raises(ValidationError) as exc:
        platform_from_dict(doc)
    assert exc.value.field == key


def test_bad_latency_and_json():
    doc = platform_doc(lat_ns=0)
    with pytest.raises(ValidationError):
        platform_from_dict(doc)
    with pytest.raises(ParseError):
        load_platform("{not json")
    with pytest.raises(ValidationError):
        load_platform(json.dumps({"core_types": []}))


def test_resource_names():
    assert str(core(3)) == "core3"
    assert str(domain(0)) == "domain0"
    assert str(task(2)) == "task2"
    assert str(SYSTEM) == "system"
    assert SYSTEM.kind is ResourceKind.SYSTEM


platforms = st.builds(
    lambda nl, nb, lf, bf, lat: platform_doc(little_freqs=lf, big_freqs=bf, n_little=nl,
                                             n_big=nb, lat_ns=lat),
    st.integers(1, 6), st.integers(0, 6),
    st.lists(st.floats(0.1, 4.0), min_size=1, max_size=5, unique=True).map(sorted),
    st.lists(st.floats(0.1, 4.0), min_size=1, max_size=5, unique=True).map(sorted),
    st.floats(1.0, 500.0))


@settings(max_examples=60, deadline=None)
@given(platforms)
def test_domains_partition_cores(doc):
    info = platform_from_dict(doc)
    seen = []
    for d in info.freq_domains:
        seen.extend(info.cores_in_domain(d.id))
        assert len({info.type_index_of_core(c) for c in d.core_ids}) == 1
    assert sorted(seen) == list(range(info.num_cores))
    assert len(seen) == len(set(seen))


@settings(max_examples=60, deadline=None)
@given(platforms)
def test_platform_round_trip(doc):
    info = platform_from_dict(doc)
    assert load_platform(dump_platform(info)) == info
