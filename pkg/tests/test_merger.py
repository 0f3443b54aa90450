from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import read_fixture
from dflow import MergeError, merge, model_equals, parse, print_model, validate
from strategies import valid_models

HELLO = read_fixture("hello_world.dflow")


@pytest.fixture
def demo():
    return parse(read_fixture("demo.dflow"))


@pytest.fixture
def weather():
    return parse(read_fixture("weather.dflow"))


def test_demo_and_weather_combine(demo, weather):
    merged = merge([demo, weather])
    assert len(merged.intents) == 4
    assert len(merged.eservices) == 4
    assert len(merged.dialogues) == 4
    assert validate(merged).valid


def test_single_input_is_identity(demo):
    assert model_equals(merge([demo]), demo)


def test_exact_duplicates_collapse(demo):
    assert model_equals(merge([demo, demo]), demo)


def test_empty_list_gives_empty_model():
    assert merge([]) == parse("")


def test_different_definitions_conflict():
    mutant = HELLO.replace('"hey",\n', "")
    with pytest.raises(MergeError) as info:
        merge([parse(HELLO), parse(mutant)])
    (conflict,) = info.value.conflicts
    assert (conflict.name, conflict.kind) == ("greet", "trigger")
    assert conflict.first_span.start_line == 2
    assert conflict.to_diagnostic().code == "M001"


def test_every_conflict_is_reported():
    a = parse(HELLO)
    b = parse(HELLO.replace('"hey",\n', "").replace("Hello friend", "Hi friend"))
    with pytest.raises(MergeError) as info:
        merge([a, b])
    assert [(c.kind, c.name) for c in info.value.conflicts] == [("trigger", "greet"), ("dialogue", "dialogue_1")]


def test_two_dialogues_on_one_trigger_conflict_at_merge():
    a = parse(HELLO)
    b = parse(HELLO.replace("dialogue_1", "dialogue_2").replace("ActionGroup resp", "ActionGroup other"))
    with pytest.raises(MergeError) as info:
        merge([a, b])
    (conflict,) = info.value.conflicts
    assert conflict.name == "greet" and conflict.kind == "trigger"
    assert "more than one model" in conflict.message()


def test_order_is_stable(demo, weather):
    merged = merge([weather, demo])
    assert [i.name for i in merged.intents] == ["ask_weather", "greet", "find_pharmacy", "tell_joke"]


def test_merged_model_prints_and_reparses(demo, weather):
    merged = merge([demo, weather])
    assert model_equals(parse(print_model(merged)), merged)


def test_conflict_serializes(demo):
    other = parse(read_fixture("demo.dflow").replace("/quotes/get_joke", "/quotes/random"))
    with pytest.raises(MergeError) as info:
        merge([demo, other])
    (payload,) = [c.to_dict() for c in info.value.conflicts]
    assert payload["name"] == "jokes_svc" and payload["kind"] == "eservice"
    assert payload["second_span"]["start_line"] == payload["first_span"]["start_line"]


def _try_merge(models):
    try:
        return merge(models)
    except MergeError:
        return None


@settings(max_examples=40, deadline=None, suppress_health_check=list(HealthCheck))
@given(st.lists(valid_models(max_dialogues=2), min_size=1, max_size=3))
def test_merge_is_associative_and_valid_when_it_succeeds(models):
    whole = _try_merge(models)
    if whole is not None:
        assert validate(whole).valid
        assert not any(d.code == "V001" for d in validate(whole).diagnostics)
    if len(models) == 3:
        left = _try_merge(models[:2])
        if left is not None and whole is not None:
            assert model_equals(merge([left, models[2]]), whole)


@settings(max_examples=40, deadline=None, suppress_health_check=list(HealthCheck))
@given(valid_models())
def test_merge_with_itself_is_identity(model):
    assert model_equals(merge([model, model]), model)
